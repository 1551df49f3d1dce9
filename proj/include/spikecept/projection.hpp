#pragma once

#include <cstdint>
#include <vector>

#include "spikecept/lif.hpp"

namespace spikecept {

struct PlasticityParams {
    double eta_post = 0.01;
    double eta_pre = 0.0001;
    double tau_pre = 20.0;
    double tau_post = 20.0;
    double w_min = 0.0;
    double w_max = 1.0;
    double c_norm = 0.0; // incoming-sum target; 0 = fan-in * 0.1 at build
    // Stacked modules see far sparser input than the pixel encoder, so
    // their normalization target and weight cap can be set separately.
    // 0 means "same as the stage-1 value".
    double c_norm_stacked = 0.0;
    double w_max_stacked = 0.0;

    void validate() const;
};

// A directed synapse group between two populations: CSR connectivity in
// both directions, one weight per connection, and trace-based STDP state
// for plastic (always excitatory) projections.
//
// Traces are stored per neuron with a last-event timestep stamp and
// decayed lazily through a cumulative table of per-step factors, so the
// trajectories coincide with a dense per-step simulation.
class Projection {
public:
    Projection() = default;

    // connectivity[j] lists the presynaptic indices of postsynaptic
    // neuron j, in a fixed documented order.
    Projection(std::uint32_t n_pre, std::uint32_t n_post, int sign,
               bool plastic, const PlasticityParams& plast,
               const std::vector<std::vector<std::uint32_t>>& connectivity);

    std::uint32_t n_pre() const { return n_pre_; }
    std::uint32_t n_post() const { return n_post_; }
    int sign() const { return sign_; }
    bool plastic() const { return plastic_; }
    bool frozen() const { return frozen_; }
    void freeze() { frozen_ = true; }
    void unfreeze() { frozen_ = false; }
    const PlasticityParams& plast() const { return plast_; }

    std::size_t connection_count() const { return w_.size(); }
    std::size_t live_connection_count() const;

    // Deliver one presynaptic spike: I of each live, non-refractory
    // postsynaptic partner changes by sign * w.
    void deliver(std::uint32_t pre, NeuronPopulation& target, double t) const;

    // STDP events (Eq.-(4)-style pairwise rule). Within one timestep the
    // engine applies all on_pre before all on_post, so a simultaneous
    // pre/post pairing potentiates with a full trace of 1.
    void on_pre_spike(std::uint32_t pre, std::int64_t step);
    void on_post_spike(std::uint32_t post, std::int64_t step);

    // Rescale each postsynaptic neuron's incoming weights so their sum
    // equals c_norm; all-zero rows are left alone and counted.
    // Returns the number of skipped zero-sum rows.
    std::size_t normalize_incoming(double c_norm);

    void reset_traces();

    double trace_pre(std::uint32_t i, std::int64_t step) const {
        return decayed(x_pre_[i], step - x_pre_step_[i], pow_pre_);
    }
    double trace_post(std::uint32_t j, std::int64_t step) const {
        return decayed(x_post_[j], step - x_post_step_[j], pow_post_);
    }

    // Per-step trace decay factors are derived from dt once; changing dt
    // mid-run is a configuration error.
    void bind_dt(double dt);

    double weight(std::uint32_t conn) const { return w_[conn]; }
    std::vector<double>& weights() { return w_; }
    const std::vector<double>& weights() const { return w_; }

    // Post-major enumeration helpers.
    std::uint32_t post_begin(std::uint32_t j) const { return post_offsets_[j]; }
    std::uint32_t post_end(std::uint32_t j) const { return post_offsets_[j + 1]; }
    std::uint32_t conn_pre(std::uint32_t conn) const { return conn_pre_[conn]; }
    std::uint32_t conn_post(std::uint32_t conn) const { return conn_post_[conn]; }

    bool conn_dead(std::uint32_t conn) const {
        return !conn_dead_.empty() && conn_dead_[conn];
    }
    void kill_connection(std::uint32_t conn);
    void kill_post(std::uint32_t j);

    double incoming_sum(std::uint32_t j) const;

private:
    static double decayed(double value, std::int64_t steps,
                          const std::vector<double>& table) {
        if (value == 0.0) return 0.0;
        if (steps >= static_cast<std::int64_t>(table.size()))
            return 0.0; // beyond the table the factor underflows anyway
        return value * table[steps];
    }
    double clip(double w) const {
        if (w < plast_.w_min) return plast_.w_min;
        if (w > plast_.w_max) return plast_.w_max;
        return w;
    }

    std::uint32_t n_pre_ = 0, n_post_ = 0;
    int sign_ = +1;
    bool plastic_ = false;
    bool frozen_ = false;
    PlasticityParams plast_{};

    std::vector<std::uint32_t> post_offsets_; // n_post + 1
    std::vector<std::uint32_t> conn_pre_;     // per connection
    std::vector<std::uint32_t> conn_post_;    // per connection
    std::vector<double> w_;
    std::vector<std::uint8_t> conn_dead_;

    std::vector<std::uint32_t> pre_offsets_; // n_pre + 1
    std::vector<std::uint32_t> pre_conn_;    // connection ids grouped by pre

    std::vector<double> x_pre_, x_post_;
    std::vector<std::int64_t> x_pre_step_, x_post_step_;
    std::vector<double> pow_pre_, pow_post_; // pow_*[n] = decay^n
    double dt_ = 0.0;
};

// Soft winner-take-all wiring: within each location every neuron
// inhibits every other neuron at that location with one fixed weight.
// The all-to-all synapses are implied, never materialized.
struct InhibitionGroup {
    std::uint32_t locations = 0;
    std::uint32_t features = 0;
    double w_inh = 17.5;

    std::uint64_t synapse_count() const {
        return static_cast<std::uint64_t>(locations) * features *
               (features - 1);
    }

    void deliver(std::uint32_t spiker, NeuronPopulation& pop, double t) const {
        const std::uint32_t loc = spiker / features;
        const std::uint32_t base = loc * features;
        for (std::uint32_t j = base; j < base + features; ++j) {
            if (j == spiker || pop.is_dead(j) || pop.in_refractory(j, t))
                continue;
            pop.inject(j, -w_inh);
        }
    }
};

} // namespace spikecept
