#pragma once

#include <cstdint>
#include <vector>

#include "spikecept/topology.hpp"

namespace spikecept {

// Flat per-step spike train over a fixed unit range.
struct SpikeTrain {
    std::uint32_t n_steps = 0;
    std::vector<std::uint32_t> offsets; // n_steps + 1
    std::vector<std::uint32_t> indices;

    explicit SpikeTrain(std::uint32_t steps = 0)
        : n_steps(steps), offsets(steps + 1, 0) {}

    std::uint64_t total() const { return indices.size(); }
    const std::uint32_t* begin_of(std::uint32_t step) const {
        return indices.data() + offsets[step];
    }
    const std::uint32_t* end_of(std::uint32_t step) const {
        return indices.data() + offsets[step + 1];
    }
};

SpikeTrain train_from_record(const SpikeRecord& rec, std::uint32_t n_steps,
                             double dt);

struct StagePresentation {
    SpikeRecord output;                     // module concatenated output
    std::vector<std::uint32_t> input_counts; // per input-grid position
    std::uint64_t input_total = 0;
    std::uint64_t pra_total = 0; // post-PRA spikes (0 for stage 1)
};

// Simulation clock for one stage. Event order within a step: deliver
// previous spikes, decay currents, integrate voltages, update
// thresholds, then run the plasticity hooks. Strictly sequential and
// deterministic.
class StageEngine {
public:
    StageEngine(BuiltStage& stage, double dt);

    // Simulate `steps` timesteps driven by `upstream`: encoded pixel
    // spikes for stage 1, the previous module's output spikes otherwise.
    StagePresentation present(const SpikeTrain& upstream, std::uint32_t steps,
                              bool collect_input_map = false);

    // v and I back to rest everywhere, refractory and traces cleared;
    // theta, weights and w_p persist.
    void rest();

    void set_learning(bool on);
    void set_homeostasis(bool on);

    double dt() const { return dt_; }

private:
    BuiltStage& stage_;
    double dt_;
    std::vector<std::vector<std::uint32_t>> last_spikes_; // per pathway
    std::vector<std::uint32_t> last_pra_spikes_;
};

} // namespace spikecept
