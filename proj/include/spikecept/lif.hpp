#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spikecept {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Current-based LIF neuron constants. Times are in ms, voltages in mV,
// currents in weight units (R folds the scale into the weights).
struct LIFParams {
    double v_rest = -65.0;
    double v_reset = -65.0;
    double v_thres = -52.0;
    double tau_v = 100.0;
    double tau_I = 1.0;
    double R = 1.0;
    double t_ref = 5.0;
    double theta_plus = 0.05;
    double tau_theta = 1e7;

    void validate() const;
};

// Per-presentation spike log: sparse per-step indices plus running
// per-neuron totals.
struct SpikeRecord {
    std::vector<std::pair<double, std::vector<std::uint32_t>>> per_step;
    std::vector<std::uint64_t> counts;

    explicit SpikeRecord(std::size_t n = 0) : counts(n, 0) {}

    void add(double t, std::vector<std::uint32_t> indices) {
        for (std::uint32_t i : indices) counts.at(i)++;
        if (!indices.empty()) per_step.emplace_back(t, std::move(indices));
    }

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
};

// A group of LIF units sharing one parameter set. The adaptive threshold
// is stored as a non-negative offset above v_thres; the effective
// threshold is v_thres + theta.
class NeuronPopulation {
public:
    NeuronPopulation() = default;
    NeuronPopulation(std::size_t size, const LIFParams& params);

    std::size_t size() const { return v_.size(); }
    const LIFParams& params() const { return params_; }

    // Exponential decay of I toward 0 (decay part of the current
    // equation; spike-driven jumps are applied by the projections).
    void step_current(double dt);

    // Advance v, detect threshold crossings, reset and enter refractory.
    // Refractory neurons only decay toward v_rest and never fire.
    void step_voltage(double t, double dt);

    // Decay theta toward 0, add theta_plus for neurons that just spiked.
    void step_threshold(double dt);

    // Back to quiescence: v = v_rest, I = 0, refractory cleared.
    // theta survives (homeostasis persists across presentations).
    void rest();

    bool in_refractory(std::uint32_t i, double t) const {
        return t < refrac_until_[i];
    }
    bool is_dead(std::uint32_t i) const {
        return !dead_.empty() && dead_[i];
    }
    void kill(std::uint32_t i) {
        if (dead_.empty()) dead_.assign(size(), 0);
        dead_[i] = 1;
    }
    std::size_t dead_count() const;

    void inject(std::uint32_t i, double delta) { I_[i] += delta; }

    // Homeostasis gate: evaluation passes freeze theta increments.
    void set_adapt_theta(bool on) { adapt_theta_ = on; }

    double v(std::uint32_t i) const { return v_[i]; }
    double current(std::uint32_t i) const { return I_[i]; }
    double theta(std::uint32_t i) const { return theta_[i]; }
    bool spiked(std::uint32_t i) const { return spiked_[i]; }
    const std::vector<std::uint8_t>& spiked() const { return spiked_; }
    std::vector<std::uint32_t> spiked_indices() const;

    void set_v(std::uint32_t i, double value) { v_[i] = value; }
    void set_theta(std::uint32_t i, double value) { theta_[i] = value; }
    std::vector<double>& theta_values() { return theta_; }
    const std::vector<double>& theta_values() const { return theta_; }

private:
    void refresh_factors(double dt);

    LIFParams params_{};
    std::vector<double> v_, I_, theta_, refrac_until_;
    std::vector<std::uint8_t> spiked_;
    std::vector<std::uint8_t> dead_;
    bool adapt_theta_ = true;

    // cached per-dt decay factors
    double cached_dt_ = -1.0;
    double decay_v_ = 0.0, decay_I_ = 0.0, decay_theta_ = 0.0;
};

} // namespace spikecept
