#include "spikecept/engine.hpp"

#include <cmath>

namespace spikecept {

SpikeTrain train_from_record(const SpikeRecord& rec, std::uint32_t n_steps,
                             double dt) {
    SpikeTrain train(n_steps);
    train.indices.reserve(rec.total());
    std::size_t cursor = 0;
    for (std::uint32_t step = 0; step < n_steps; ++step) {
        const double t = step * dt;
        while (cursor < rec.per_step.size() &&
               rec.per_step[cursor].first <= t + dt * 0.5) {
            for (std::uint32_t i : rec.per_step[cursor].second)
                train.indices.push_back(i);
            ++cursor;
        }
        train.offsets[step + 1] = static_cast<std::uint32_t>(train.indices.size());
    }
    return train;
}

StageEngine::StageEngine(BuiltStage& stage, double dt)
    : stage_(stage), dt_(dt) {
    if (dt <= 0) throw ConfigError("engine: dt must be positive");
    last_spikes_.resize(stage_.pathways.size());
    for (auto& bp : stage_.pathways) bp.ff.bind_dt(dt);
}

void StageEngine::rest() {
    for (std::uint32_t p = 0; p < stage_.pathways.size(); ++p) {
        stage_.pathways[p].pop.rest();
        stage_.pathways[p].ff.reset_traces();
        last_spikes_[p].clear();
    }
    if (stage_.pra) stage_.pra->pop.rest();
    last_pra_spikes_.clear();
}

void StageEngine::set_learning(bool on) {
    for (auto& bp : stage_.pathways)
        on ? bp.ff.unfreeze() : bp.ff.freeze();
}

void StageEngine::set_homeostasis(bool on) {
    for (auto& bp : stage_.pathways) bp.pop.set_adapt_theta(on);
}

StagePresentation StageEngine::present(const SpikeTrain& upstream,
                                       std::uint32_t steps,
                                       bool collect_input_map) {
    StagePresentation res;
    res.output = SpikeRecord(stage_.output_size);
    if (collect_input_map) res.input_counts.assign(stage_.input_size, 0);

    BuiltPra* pra = stage_.pra ? &*stage_.pra : nullptr;

    std::vector<std::uint32_t> module_input;
    for (std::uint32_t step = 0; step < steps; ++step) {
        const double t = step * dt_;

        // (1) deliveries
        module_input.clear();
        if (pra) {
            for (auto it = upstream.begin_of(step); it != upstream.end_of(step);
                 ++it) {
                const std::uint32_t j = *it / pra->pool_factor;
                if (!pra->pop.in_refractory(j, t)) pra->pop.inject(j, pra->w_p);
            }
            module_input = last_pra_spikes_;
        } else {
            module_input.assign(upstream.begin_of(step), upstream.end_of(step));
        }
        for (std::uint32_t p = 0; p < stage_.pathways.size(); ++p) {
            auto& bp = stage_.pathways[p];
            for (std::uint32_t pre : module_input)
                bp.ff.deliver(pre, bp.pop, t);
            for (std::uint32_t s : last_spikes_[p])
                bp.inh.deliver(s, bp.pop, t);
        }

        // (2)-(4) dynamics
        if (pra) {
            pra->pop.step_current(dt_);
            pra->pop.step_voltage(t, dt_);
            pra->pop.step_threshold(dt_);
        }
        for (auto& bp : stage_.pathways) {
            bp.pop.step_current(dt_);
            bp.pop.step_voltage(t, dt_);
            bp.pop.step_threshold(dt_);
        }

        // (5) plasticity hooks
        for (std::uint32_t p = 0; p < stage_.pathways.size(); ++p) {
            auto& bp = stage_.pathways[p];
            for (std::uint32_t pre : module_input) bp.ff.on_pre_spike(pre, step);
            last_spikes_[p] = bp.pop.spiked_indices();
            for (std::uint32_t j : last_spikes_[p]) bp.ff.on_post_spike(j, step);
        }

        // accounting
        if (pra) {
            last_pra_spikes_ = pra->pop.spiked_indices();
            res.pra_total += last_pra_spikes_.size();
            if (collect_input_map)
                for (std::uint32_t j : last_pra_spikes_) res.input_counts[j]++;
            res.input_total += last_pra_spikes_.size();
        } else {
            if (collect_input_map)
                for (std::uint32_t i : module_input) res.input_counts[i]++;
            res.input_total += module_input.size();
        }
        std::vector<std::uint32_t> out;
        for (std::uint32_t p = 0; p < stage_.pathways.size(); ++p)
            for (std::uint32_t j : last_spikes_[p])
                out.push_back(stage_.pathways[p].concat_offset + j);
        res.output.add(t, std::move(out));
    }
    return res;
}

} // namespace spikecept
