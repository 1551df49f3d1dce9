#include "spikecept/projection.hpp"

#include <cmath>
#include <numeric>

namespace spikecept {

void PlasticityParams::validate() const {
    if (tau_pre <= 0 || tau_post <= 0)
        throw ConfigError("PlasticityParams: trace time constants must be positive");
    if (!(w_min >= 0 && w_min < w_max))
        throw ConfigError("PlasticityParams: require 0 <= w_min < w_max");
    if (eta_post < 10.0 * eta_pre)
        throw ConfigError("PlasticityParams: eta_post must dominate (>= 10 * eta_pre)");
}

Projection::Projection(std::uint32_t n_pre, std::uint32_t n_post, int sign,
                       bool plastic, const PlasticityParams& plast,
                       const std::vector<std::vector<std::uint32_t>>& connectivity)
    : n_pre_(n_pre), n_post_(n_post), sign_(sign), plastic_(plastic),
      plast_(plast) {
    if (plastic_ && sign_ != +1)
        throw ConfigError("Projection: plastic projections must be excitatory");
    if (plastic_) plast_.validate();
    if (connectivity.size() != n_post)
        throw ConfigError("Projection: connectivity rows must equal n_post");

    post_offsets_.resize(n_post + 1, 0);
    for (std::uint32_t j = 0; j < n_post; ++j)
        post_offsets_[j + 1] =
            post_offsets_[j] + static_cast<std::uint32_t>(connectivity[j].size());
    const std::uint32_t n_conn = post_offsets_[n_post];
    conn_pre_.reserve(n_conn);
    conn_post_.reserve(n_conn);
    for (std::uint32_t j = 0; j < n_post; ++j) {
        for (std::uint32_t pre : connectivity[j]) {
            if (pre >= n_pre)
                throw ConfigError("Projection: presynaptic index out of range");
            conn_pre_.push_back(pre);
            conn_post_.push_back(j);
        }
    }
    w_.assign(n_conn, 0.0);

    // pre-major view
    pre_offsets_.assign(n_pre + 1, 0);
    for (std::uint32_t c = 0; c < n_conn; ++c) pre_offsets_[conn_pre_[c] + 1]++;
    for (std::uint32_t i = 0; i < n_pre; ++i) pre_offsets_[i + 1] += pre_offsets_[i];
    pre_conn_.resize(n_conn);
    {
        std::vector<std::uint32_t> cursor(pre_offsets_.begin(),
                                          pre_offsets_.end() - 1);
        for (std::uint32_t c = 0; c < n_conn; ++c)
            pre_conn_[cursor[conn_pre_[c]]++] = c;
    }

    if (plastic_) {
        x_pre_.assign(n_pre, 0.0);
        x_post_.assign(n_post, 0.0);
        x_pre_step_.assign(n_pre, 0);
        x_post_step_.assign(n_post, 0);
    }
}

void Projection::bind_dt(double dt) {
    if (!plastic_) return;
    if (dt == dt_) return;
    dt_ = dt;
    const double f_pre = std::exp(-dt / plast_.tau_pre);
    const double f_post = std::exp(-dt / plast_.tau_post);
    // big enough that the factor has underflowed past any tolerance
    const std::size_t n = static_cast<std::size_t>(64.0 * plast_.tau_pre / dt) + 2;
    pow_pre_.resize(n);
    pow_post_.resize(n);
    pow_pre_[0] = pow_post_[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        pow_pre_[k] = pow_pre_[k - 1] * f_pre;
        pow_post_[k] = pow_post_[k - 1] * f_post;
    }
}

void Projection::deliver(std::uint32_t pre, NeuronPopulation& target,
                         double t) const {
    for (std::uint32_t k = pre_offsets_[pre]; k < pre_offsets_[pre + 1]; ++k) {
        const std::uint32_t c = pre_conn_[k];
        if (conn_dead(c)) continue;
        const std::uint32_t j = conn_post_[c];
        if (target.is_dead(j) || target.in_refractory(j, t)) continue;
        target.inject(j, sign_ * w_[c]);
    }
}

void Projection::on_pre_spike(std::uint32_t pre, std::int64_t step) {
    if (!plastic_) return;
    if (!frozen_) {
        for (std::uint32_t k = pre_offsets_[pre]; k < pre_offsets_[pre + 1]; ++k) {
            const std::uint32_t c = pre_conn_[k];
            if (conn_dead(c)) continue;
            const double xp = trace_post(conn_post_[c], step);
            if (xp != 0.0) w_[c] = clip(w_[c] - plast_.eta_pre * xp);
        }
    }
    x_pre_[pre] = 1.0;
    x_pre_step_[pre] = step;
}

void Projection::on_post_spike(std::uint32_t post, std::int64_t step) {
    if (!plastic_) return;
    if (!frozen_) {
        for (std::uint32_t c = post_offsets_[post]; c < post_offsets_[post + 1]; ++c) {
            if (conn_dead(c)) continue;
            const double xp = trace_pre(conn_pre_[c], step);
            if (xp != 0.0) w_[c] = clip(w_[c] + plast_.eta_post * xp);
        }
    }
    x_post_[post] = 1.0;
    x_post_step_[post] = step;
}

std::size_t Projection::normalize_incoming(double c_norm) {
    std::size_t skipped = 0;
    for (std::uint32_t j = 0; j < n_post_; ++j) {
        const double sum = incoming_sum(j);
        if (sum <= 0.0) {
            skipped++;
            continue;
        }
        const double scale = c_norm / sum;
        for (std::uint32_t c = post_offsets_[j]; c < post_offsets_[j + 1]; ++c) {
            if (conn_dead(c)) continue;
            const double w = w_[c] * scale;
            w_[c] = w > plast_.w_max ? plast_.w_max : w;
        }
    }
    return skipped;
}

double Projection::incoming_sum(std::uint32_t j) const {
    double sum = 0.0;
    for (std::uint32_t c = post_offsets_[j]; c < post_offsets_[j + 1]; ++c)
        if (!conn_dead(c)) sum += w_[c];
    return sum;
}

void Projection::reset_traces() {
    std::fill(x_pre_.begin(), x_pre_.end(), 0.0);
    std::fill(x_post_.begin(), x_post_.end(), 0.0);
    std::fill(x_pre_step_.begin(), x_pre_step_.end(), 0);
    std::fill(x_post_step_.begin(), x_post_step_.end(), 0);
}

void Projection::kill_connection(std::uint32_t conn) {
    if (conn_dead_.empty()) conn_dead_.assign(w_.size(), 0);
    conn_dead_[conn] = 1;
    w_[conn] = 0.0;
}

void Projection::kill_post(std::uint32_t j) {
    for (std::uint32_t c = post_offsets_[j]; c < post_offsets_[j + 1]; ++c)
        kill_connection(c);
}

std::size_t Projection::live_connection_count() const {
    if (conn_dead_.empty()) return w_.size();
    std::size_t n = 0;
    for (auto d : conn_dead_) n += !d;
    return n;
}

} // namespace spikecept
