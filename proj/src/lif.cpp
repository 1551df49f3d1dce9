#include "spikecept/lif.hpp"

#include <cmath>

namespace spikecept {

void LIFParams::validate() const {
    if (tau_v <= 0 || tau_I <= 0 || tau_theta <= 0)
        throw ConfigError("LIFParams: time constants must be positive");
    if (t_ref < 0)
        throw ConfigError("LIFParams: refractory period must be non-negative");
    if (v_reset > v_thres)
        throw ConfigError("LIFParams: v_reset must not exceed v_thres");
}

NeuronPopulation::NeuronPopulation(std::size_t size, const LIFParams& params)
    : params_(params),
      v_(size, params.v_rest),
      I_(size, 0.0),
      theta_(size, 0.0),
      refrac_until_(size, -1.0),
      spiked_(size, 0) {
    params_.validate();
}

void NeuronPopulation::refresh_factors(double dt) {
    if (dt == cached_dt_) return;
    if (dt <= 0) throw ConfigError("step: dt must be positive");
    // Exact per-step decay of the linear leak terms. Keeps the free
    // dynamics on the closed-form exponential at any dt.
    decay_v_ = std::exp(-dt / params_.tau_v);
    decay_I_ = std::exp(-dt / params_.tau_I);
    decay_theta_ = std::exp(-dt / params_.tau_theta);
    cached_dt_ = dt;
}

void NeuronPopulation::step_current(double dt) {
    refresh_factors(dt);
    for (double& i : I_) i *= decay_I_;
}

void NeuronPopulation::step_voltage(double t, double dt) {
    refresh_factors(dt);
    const double thres = params_.v_thres;
    for (std::uint32_t i = 0; i < v_.size(); ++i) {
        spiked_[i] = 0;
        if (is_dead(i)) continue;
        if (t < refrac_until_[i]) {
            // input integration is suspended; only the leak acts
            v_[i] = params_.v_rest + (v_[i] - params_.v_rest) * decay_v_;
            continue;
        }
        const double v_inf = params_.v_rest + params_.R * I_[i];
        v_[i] = v_inf + (v_[i] - v_inf) * decay_v_;
        if (!std::isfinite(v_[i]))
            throw NumericError("non-finite membrane potential at neuron " +
                               std::to_string(i));
        if (v_[i] >= thres + theta_[i]) {
            spiked_[i] = 1;
            // extension hook: alternative repolarization schemes would
            // replace this plain reset
            v_[i] = params_.v_reset;
            refrac_until_[i] = t + params_.t_ref;
        }
    }
}

void NeuronPopulation::step_threshold(double dt) {
    // the homeostasis gate freezes theta entirely, so frozen passes
    // leave the network bit-identical
    if (!adapt_theta_) return;
    refresh_factors(dt);
    for (std::uint32_t i = 0; i < theta_.size(); ++i) {
        theta_[i] *= decay_theta_;
        if (spiked_[i]) theta_[i] += params_.theta_plus;
    }
}

void NeuronPopulation::rest() {
    for (std::uint32_t i = 0; i < v_.size(); ++i) {
        v_[i] = params_.v_rest;
        I_[i] = 0.0;
        refrac_until_[i] = -1.0;
        spiked_[i] = 0;
    }
}

std::size_t NeuronPopulation::dead_count() const {
    std::size_t n = 0;
    for (auto d : dead_) n += d;
    return n;
}

std::vector<std::uint32_t> NeuronPopulation::spiked_indices() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < spiked_.size(); ++i)
        if (spiked_[i]) out.push_back(i);
    return out;
}

} // namespace spikecept
