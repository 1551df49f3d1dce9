#pragma once

#include <string>
#include <vector>

#include "spikecept/io.hpp"

namespace spikecept {

// Bundled configurations, addressable by name wherever the CLI takes a
// config path. Lookup is case-insensitive.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
FullConfig preset_config(const std::string& name);

// Loads a preset by name or parses a JSON file from disk.
FullConfig load_config(const std::string& path_or_preset);

} // namespace spikecept
