#pragma once

#include <cstdint>

#include "spikecept/dataset.hpp"

namespace spikecept {

// Deterministic synthetic digit images: stroke templates for 0-9
// rendered at 28x28 with random affine jitter and pixel noise. A
// stand-in with the same file format and geometry as MNIST for
// environments without the real dataset.
Dataset synth_digits(std::size_t count, std::uint64_t seed,
                     const std::string& split = "train");

} // namespace spikecept
