#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spikecept/codec.hpp"
#include "spikecept/dataset.hpp"
#include "spikecept/engine.hpp"
#include "spikecept/topology.hpp"

namespace spikecept {

struct TrainConfig {
    std::vector<std::uint64_t> stage_iterations; // presentations per stage
    std::uint32_t checkpoint_every = 500;
    std::uint64_t seed = 1;
    double dt = 0.5;          // ms
    double t_present = 350.0; // ms
    LIFParams lif{};
    PlasticityParams plast{};
    double label_fraction = 0.1;
    std::uint32_t label_min_per_class = 100;

    std::uint32_t steps() const {
        return static_cast<std::uint32_t>(t_present / dt + 0.5);
    }
    void validate() const;
    // Equal iterations for every stage when no schedule was given.
    std::vector<std::uint64_t> schedule(std::uint32_t stages,
                                        std::uint64_t default_iters) const;
};

// Frozen or learning forward passes through a built network, with the
// adaptive-intensity retry loop (lambda at stage 1, w_p behind later
// stages). Owns one engine per stage; all state lives in the Network.
class Pipeline {
public:
    Pipeline(Network& net, const TrainConfig& cfg);

    struct StageResult {
        StagePresentation pres;
        std::uint32_t retries = 0;
        bool flagged = false; // intensity floor unreachable at the cap
    };

    // One adaptive presentation of a single stage. In learning mode the
    // lambda / w_p bumps persist; frozen passes restore them afterwards.
    StageResult present_stage(std::uint32_t stage, const std::uint8_t* image,
                              const SpikeTrain* upstream,
                              std::uint64_t image_key, bool learning,
                              bool collect_input_map = false);

    struct ForwardResult {
        SpikeRecord final_output;
        std::vector<std::uint64_t> stage_input;  // spikes entering each module
        std::vector<std::uint64_t> stage_output; // module output spikes
        std::vector<std::vector<std::uint32_t>> input_maps; // if requested
        std::uint32_t retries = 0;
        bool flagged = false;
    };

    // Frozen pass through all stages (plasticity and homeostasis off).
    ForwardResult forward(const std::uint8_t* image, std::uint64_t image_key,
                          bool collect_maps = false);

    EncoderState& encoder() { return enc_; }
    StageEngine& engine(std::uint32_t s) { return engines_[s]; }
    Network& net() { return net_; }
    const TrainConfig& cfg() const { return cfg_; }

private:
    Network& net_;
    TrainConfig cfg_;
    EncoderState enc_;
    std::vector<StageEngine> engines_;
};

// Serializable mid-training position.
struct TrainCursor {
    std::uint32_t stage = 0;
    std::uint64_t iteration = 0; // within the stage
    bool finished = false;
};

struct TrainResult {
    TrainCursor cursor;
    std::uint64_t total_retries = 0;
    std::uint64_t flagged_presentations = 0;
    std::uint64_t wraps = 0; // dataset re-used (multi-epoch)
};

// Checkpoint callback: invoked at the configured cadence and at stage
// boundaries. Arguments: cursor after the presentation just finished.
using CheckpointHook = std::function<void(const TrainCursor&)>;

// Module-by-module training: stage n is trained on the recorded frozen
// output of stage n-1. Deterministic under (cfg.seed, spec).
TrainResult train(Pipeline& pipe, const Dataset& data,
                  const std::vector<std::uint64_t>& schedule,
                  const TrainCursor& start = {},
                  const CheckpointHook& hook = nullptr);

// Labeling pass: frozen responses over a class-balanced slice of the
// training data; also fits the 2-gram decoder from the same passes.
struct LabelingResult {
    LabelAssignment la;
    BigramModel bigram;
    std::size_t images_used = 0;
};
LabelingResult label_pass(Pipeline& pipe, const Dataset& data);

enum class Decoder { Vote, Vfa, Bigram };
Decoder decoder_from_name(const std::string& name);

struct EvalResult {
    double accuracy = 0.0;
    std::array<std::array<std::uint32_t, kClassCount>, kClassCount> confusion{};
    std::size_t no_spike = 0;
};
EvalResult evaluate(Pipeline& pipe, const Dataset& test,
                    const LabelingResult& labels, Decoder decoder);

struct RobustnessRow {
    double rho = 0.0;
    double mean_accuracy = 0.0;
    double stddev = 0.0;
};
// lambda: trained encoder intensity; 0 keeps the configured default.
std::vector<RobustnessRow> robustness_sweep(
    const Network& trained, const TrainConfig& cfg, const Dataset& test,
    const LabelingResult& labels, Decoder decoder,
    const std::vector<double>& rhos, AblateMode mode, std::uint32_t trials,
    std::uint64_t seed, double lambda = 0.0);

struct IntensityRow {
    std::uint32_t stage = 0;
    double input_spikes = 0.0;  // mean per presentation (post-PRA for n>1)
    double output_spikes = 0.0; // module output mean
};
struct IntensityReport {
    std::vector<IntensityRow> rows;
    std::uint64_t flagged = 0;
    std::uint64_t min_final_output = 0; // over non-flagged presentations
};
IntensityReport measure_intensity(Pipeline& pipe, const Dataset& data,
                                  std::size_t n_images);

// Spatial-distribution similarity of two mean-1-normalized images.
double sds(const std::vector<double>& img1, const std::vector<double>& img2);
double msds(const std::vector<std::vector<double>>& set1,
            const std::vector<std::vector<double>>& set2);

// Per-position input-spike totals entering `stage` for one image.
std::vector<std::uint32_t> spiking_map(Pipeline& pipe, std::uint32_t stage,
                                       const std::uint8_t* image,
                                       std::uint64_t image_key);

// Mean per-class input spiking maps at each stage plus the 10x10 MSDS
// matrix of a stage's maps.
struct MsdsReport {
    std::vector<std::vector<double>> class_maps; // per class, mean map
    std::array<std::array<double, kClassCount>, kClassCount> matrix{};
    double off_diagonal_mean = 0.0;
};
MsdsReport msds_report(Pipeline& pipe, std::uint32_t stage,
                       const Dataset& data, std::size_t per_class);

} // namespace spikecept
