#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikecept/dataset.hpp"
#include "spikecept/harness.hpp"
#include "spikecept/topology.hpp"

namespace spikecept {

// ---- IDX dataset files (big-endian, magics 2051/2049) ----

Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path);
void save_mnist_idx(const Dataset& data, const std::string& images_path,
                    const std::string& labels_path);

// Buffer-level parsers, exposed for round-trip checks.
std::vector<std::uint8_t> parse_idx_images(const std::vector<std::uint8_t>& buf,
                                           const std::string& origin);
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& buf,
                                           const std::string& origin);
std::vector<std::uint8_t> serialize_idx_images(const std::vector<std::uint8_t>& pixels);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels);

// ---- JSON configuration ----

struct FullConfig {
    NetworkSpec network;
    TrainConfig train;
};

// Strict parse: unknown keys are rejected with a path-qualified message.
FullConfig parse_config(const std::string& json_text);
std::string serialize_config(const FullConfig& cfg);

// ---- checkpoints (versioned little-endian binary, crc32 trailer) ----

struct Checkpoint {
    FullConfig config;
    TrainCursor cursor;
    double lambda = 0.0;              // trained encoder intensity
    std::vector<double> w_p;          // one per stage after the first
    std::vector<std::vector<double>> thetas;  // per pathway, build order
    std::vector<std::vector<double>> weights; // per pathway, build order
    std::optional<LabelingResult> labels;
};

constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

// Snapshot / restore the mutable state of a built network.
Checkpoint make_checkpoint(const Network& net, const TrainConfig& cfg,
                           const TrainCursor& cursor, double lambda,
                           const std::optional<LabelingResult>& labels);
// Rebuilds the network from the stored spec and overlays the state.
Network restore_network(const Checkpoint& cp);

// ---- CSV metric emission ----

void emit_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<std::string>>& rows);

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

} // namespace spikecept
