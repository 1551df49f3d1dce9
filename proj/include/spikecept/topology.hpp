#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikecept/lif.hpp"
#include "spikecept/projection.hpp"
#include "spikecept/rng.hpp"

namespace spikecept {

constexpr std::uint32_t kInputSide = 28; // MNIST geometry is fixed

enum class PathwayKind { FC, LC };

// One competition pathway: FC is the k = 28, single-location special
// case of LC. F neurons per receptive-field location, unshared weights.
struct PathwaySpec {
    PathwayKind kind = PathwayKind::FC;
    std::uint32_t k = kInputSide; // kernel side (neurons)
    std::uint32_t s = 1;          // stride
    std::uint32_t F = 0;          // feature maps (= neuron count for FC)

    void validate() const;
    std::uint32_t positions_per_dim() const;
    std::uint32_t locations() const {
        std::uint32_t p = positions_per_dim();
        return p * p;
    }
    std::uint64_t neuron_count() const {
        return static_cast<std::uint64_t>(locations()) * F;
    }
    std::uint64_t plastic_synapse_count(std::uint32_t channels) const {
        return static_cast<std::uint64_t>(locations()) * F * k * k * channels;
    }
    std::uint64_t inhibitory_synapse_count() const {
        return static_cast<std::uint64_t>(locations()) * F * (F - 1);
    }
    // Input indices of the receptive field at location (lx, ly), input
    // layout row-major spatial, channel-minor.
    std::vector<std::uint32_t> receptive_field(std::uint32_t lx, std::uint32_t ly,
                                               std::uint32_t channels) const;
};

// An Sp-Inception module: pathways share one input layer; outputs are
// concatenated pathway-major, location row-major, feature-minor.
struct ModuleSpec {
    std::vector<PathwaySpec> pathways;
    bool balanced = true; // the balanced variant requires equal F
    double w_inh = 17.5;

    void validate() const;
    std::uint64_t neuron_count() const;
    std::uint64_t synapse_count(std::uint32_t channels) const;
};

// Pooling-Reshape-Activate: one LIF unit per output grid cell, pooling
// pool_factor consecutive upstream units with one shared weight.
struct PRASpec {
    std::uint32_t channels = 2;
    double w_p_init = 1.0;
    double w_p_step = 0.1;
    double w_p_max = 20.0;
    double tau_I = 100.0; // ms; slow decay rate-codes the pooled counts

    std::uint32_t output_size() const {
        return kInputSide * kInputSide * channels;
    }
    std::uint32_t pool_factor(std::uint64_t prev_output_size) const;
};

struct EncoderSpec {
    double lambda = 0.25;      // Hz per pixel unit
    double lambda_step = 0.125; // +32 Hz at max pixel
    double lambda_max = 1.0;
};

struct NetworkSpec {
    std::vector<ModuleSpec> modules;
    std::vector<PRASpec> pras; // one per module after the first
    EncoderSpec encoder;
    std::uint32_t s_min = 5; // minimum output spikes per presentation

    void validate() const;
    std::uint32_t stage_count() const {
        return static_cast<std::uint32_t>(modules.size());
    }
    std::uint32_t input_channels(std::uint32_t stage) const {
        return stage == 0 ? 1 : pras[stage - 1].channels;
    }
    std::uint64_t module_output_size(std::uint32_t stage) const {
        return modules[stage].neuron_count();
    }
};

struct NetworkStats {
    std::uint64_t n_neuron = 0;  // competition-layer neurons only
    std::uint64_t n_synapse = 0; // plastic + inhibitory + PRA pooling
};

// Exact resource accounting; never materializes connectivity.
NetworkStats count_resources(const NetworkSpec& spec);
// Cumulative stats after each stage (stats of the truncated network).
std::vector<NetworkStats> count_resources_per_stage(const NetworkSpec& spec);

// ---- materialized state ----

struct BuiltPathway {
    PathwaySpec spec;
    NeuronPopulation pop;
    Projection ff; // input -> competition, plastic excitatory
    InhibitionGroup inh;
    std::uint32_t concat_offset = 0; // position in the module output
};

struct BuiltPra {
    PRASpec spec;
    std::uint32_t pool_factor = 1;
    std::uint64_t upstream_size = 0;
    double w_p = 1.0;
    NeuronPopulation pop;
};

struct BuiltStage {
    std::optional<BuiltPra> pra; // absent for stage 1
    std::vector<BuiltPathway> pathways;
    std::uint64_t output_size = 0;
    std::uint32_t input_size = 0; // 784 * C

    // Map a concatenated output index to (pathway, local neuron).
    std::pair<std::uint32_t, std::uint32_t> locate(std::uint64_t out) const;
};

struct Network {
    NetworkSpec spec;
    std::vector<BuiltStage> stages;
    std::uint64_t output_size() const { return stages.back().output_size; }

    std::size_t live_plastic_synapses() const;
    std::size_t dead_output_neurons() const;
};

struct TrainHyper; // forward (harness.hpp)

// Build populations and plastic/inhibitory wiring. Weights initialized
// uniform in [0, 0.3] from the seed, then normalized to c_norm.
Network build_network(const NetworkSpec& spec, const LIFParams& lif,
                      const PlasticityParams& plast, std::uint64_t seed);

enum class AblateMode { Neurons, Synapses };

// Independent deletion of competition neurons (with all incident
// synapses) or of individual plastic synapses.
void ablate(Network& net, double rho_delete, AblateMode mode,
            std::uint64_t seed);

} // namespace spikecept
