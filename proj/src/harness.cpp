#include "spikecept/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace spikecept {

namespace {
// rng stream purposes
constexpr std::uint64_t kEncodeTag = 0x9c0de;
constexpr std::uint64_t kTrainTag = 0x7a11;
constexpr std::uint64_t kRecordTag = 0x52ec;
constexpr std::uint64_t kLabelTag = 0x1ab;
constexpr std::uint64_t kEvalTag = 0xe7a1;
} // namespace

void TrainConfig::validate() const {
    if (dt <= 0) throw ConfigError("train: dt must be positive");
    if (dt > lif.tau_I)
        throw ConfigError("train: dt must not exceed tau_I (stability)");
    if (t_present < dt) throw ConfigError("train: t_present shorter than dt");
    lif.validate();
    plast.validate();
    if (!(label_fraction > 0 && label_fraction <= 1))
        throw ConfigError("train: label_fraction must lie in (0, 1]");
}

std::vector<std::uint64_t> TrainConfig::schedule(
    std::uint32_t stages, std::uint64_t default_iters) const {
    if (!stage_iterations.empty()) {
        if (stage_iterations.size() != stages)
            throw ConfigError("train: stage schedule length != stage count");
        return stage_iterations;
    }
    return std::vector<std::uint64_t>(stages, default_iters);
}

Pipeline::Pipeline(Network& net, const TrainConfig& cfg)
    : net_(net), cfg_(cfg) {
    cfg_.validate();
    enc_.lambda = net.spec.encoder.lambda;
    enc_.lambda_step = net.spec.encoder.lambda_step;
    enc_.lambda_max = net.spec.encoder.lambda_max;
    engines_.reserve(net.stages.size());
    for (auto& st : net.stages) engines_.emplace_back(st, cfg_.dt);
}

Pipeline::StageResult Pipeline::present_stage(std::uint32_t stage,
                                              const std::uint8_t* image,
                                              const SpikeTrain* upstream,
                                              std::uint64_t image_key,
                                              bool learning,
                                              bool collect_input_map) {
    auto& eng = engines_[stage];
    eng.set_learning(learning);
    eng.set_homeostasis(learning);
    BuiltStage& st = net_.stages[stage];
    const std::uint32_t steps = cfg_.steps();
    const std::uint32_t s_min = net_.spec.s_min;

    double local_lambda = enc_.lambda;
    double saved_wp = st.pra ? st.pra->w_p : 0.0;

    StageResult res;
    for (std::uint32_t retry = 0;; ++retry) {
        eng.rest();
        SpikeTrain encoded(0);
        const SpikeTrain* input = upstream;
        if (stage == 0) {
            Rng rng(mix_seed(cfg_.seed, kEncodeTag, image_key, retry));
            const double lambda = learning ? enc_.lambda : local_lambda;
            encoded = encode_image(image, lambda, cfg_.dt, steps, rng);
            input = &encoded;
        }
        res.pres = eng.present(*input, steps, collect_input_map);
        res.retries = retry;

        const bool low =
            res.pres.output.total() < s_min ||
            (st.pra && res.pres.pra_total < s_min);
        if (!low) break;

        bool bumped;
        if (stage == 0) {
            if (learning) {
                bumped = enc_.bump();
            } else {
                bumped = local_lambda < enc_.lambda_max;
                if (bumped)
                    local_lambda =
                        std::min(local_lambda + enc_.lambda_step, enc_.lambda_max);
            }
        } else {
            bumped = st.pra->w_p < st.pra->spec.w_p_max;
            if (bumped)
                st.pra->w_p =
                    std::min(st.pra->w_p + st.pra->spec.w_p_step,
                             st.pra->spec.w_p_max);
        }
        if (!bumped) {
            res.flagged = true;
            break;
        }
    }
    if (!learning && st.pra) st.pra->w_p = saved_wp;
    return res;
}

Pipeline::ForwardResult Pipeline::forward(const std::uint8_t* image,
                                          std::uint64_t image_key,
                                          bool collect_maps) {
    ForwardResult fr;
    SpikeTrain carry(0);
    for (std::uint32_t s = 0; s < net_.stages.size(); ++s) {
        auto r = present_stage(s, image, s == 0 ? nullptr : &carry,
                               mix_seed(image_key, s), false, collect_maps);
        fr.retries += r.retries;
        fr.flagged = fr.flagged || r.flagged;
        fr.stage_input.push_back(r.pres.input_total);
        fr.stage_output.push_back(r.pres.output.total());
        if (collect_maps) fr.input_maps.push_back(std::move(r.pres.input_counts));
        if (s + 1 < net_.stages.size())
            carry = train_from_record(r.pres.output, cfg_.steps(), cfg_.dt);
        else
            fr.final_output = std::move(r.pres.output);
    }
    return fr;
}

namespace {

// One frozen pass of a single stage over every image, producing the
// spike trains that stimulate the next stage.
std::vector<SpikeTrain> record_outputs(Pipeline& pipe, const Dataset& data,
                                       std::uint32_t stage,
                                       const std::vector<SpikeTrain>& inputs) {
    std::vector<SpikeTrain> out;
    out.reserve(data.count());
    for (std::size_t idx = 0; idx < data.count(); ++idx) {
        auto r = pipe.present_stage(
            stage, data.image(idx), stage == 0 ? nullptr : &inputs[idx],
            mix_seed(kRecordTag, stage, idx), false);
        out.push_back(train_from_record(r.pres.output, pipe.cfg().steps(),
                                        pipe.cfg().dt));
    }
    return out;
}

} // namespace

TrainResult train(Pipeline& pipe, const Dataset& data,
                  const std::vector<std::uint64_t>& schedule,
                  const TrainCursor& start, const CheckpointHook& hook) {
    data.validate();
    if (data.count() == 0) throw ConfigError("train: empty dataset");
    const std::uint32_t stages = pipe.net().spec.stage_count();
    if (schedule.size() != stages)
        throw ConfigError("train: schedule length != stage count");

    TrainResult res;
    std::vector<SpikeTrain> inputs;
    for (std::uint32_t s = 0; s < stages; ++s) {
        if (s > 0) inputs = record_outputs(pipe, data, s - 1, inputs);
        if (s < start.stage) continue;
        const std::uint64_t it0 = (s == start.stage) ? start.iteration : 0;
        for (std::uint64_t it = it0; it < schedule[s]; ++it) {
            const std::size_t idx = it % data.count();
            if (it > 0 && idx == 0) {
                if (res.wraps == 0)
                    std::cerr << "[train] dataset exhausted; wrapping around "
                                 "(stage " << s + 1 << ")\n";
                res.wraps++;
            }
            auto r = pipe.present_stage(
                s, data.image(idx), s == 0 ? nullptr : &inputs[idx],
                mix_seed(kTrainTag, s, it), true);
            res.total_retries += r.retries;
            if (r.flagged) res.flagged_presentations++;
            for (auto& bp : pipe.net().stages[s].pathways)
                bp.ff.normalize_incoming(bp.ff.plast().c_norm);
            if (hook && (it + 1) % pipe.cfg().checkpoint_every == 0)
                hook(TrainCursor{s, it + 1, false});
        }
        pipe.engine(s).set_learning(false);
    }
    res.cursor = TrainCursor{stages - 1, schedule.back(), true};
    if (hook) hook(res.cursor);
    return res;
}

LabelingResult label_pass(Pipeline& pipe, const Dataset& data) {
    const std::size_t n = data.count();
    const auto& cfg = pipe.cfg();
    const std::size_t target = std::max<std::size_t>(
        cfg.label_min_per_class,
        static_cast<std::size_t>(cfg.label_fraction * n / kClassCount));

    std::array<std::size_t, kClassCount> taken{};
    std::vector<std::vector<std::uint64_t>> responses;
    std::vector<std::uint8_t> labels;
    LabelingResult lr;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::uint8_t cls = data.labels[idx];
        if (taken[cls] >= target) continue;
        taken[cls]++;
        auto fr = pipe.forward(data.image(idx), mix_seed(kLabelTag, idx));
        fit_bigram(lr.bigram, fr.final_output, cls);
        responses.push_back(fr.final_output.counts);
        labels.push_back(cls);
    }
    lr.la = assign_labels(responses, labels);
    lr.images_used = labels.size();
    return lr;
}

Decoder decoder_from_name(const std::string& name) {
    if (name == "vote") return Decoder::Vote;
    if (name == "vfa") return Decoder::Vfa;
    if (name == "bigram") return Decoder::Bigram;
    throw ConfigError("unknown decoder '" + name + "' (vote|vfa|bigram)");
}

namespace {
std::vector<std::uint8_t> dead_output_mask(const Network& net) {
    const auto& last = net.stages.back();
    std::vector<std::uint8_t> mask(last.output_size, 0);
    bool any = false;
    for (const auto& bp : last.pathways)
        for (std::uint32_t j = 0; j < bp.pop.size(); ++j)
            if (bp.pop.is_dead(j)) {
                mask[bp.concat_offset + j] = 1;
                any = true;
            }
    if (!any) mask.clear();
    return mask;
}
} // namespace

EvalResult evaluate(Pipeline& pipe, const Dataset& test,
                    const LabelingResult& labels, Decoder decoder) {
    test.validate();
    if (test.count() == 0) throw ConfigError("evaluate: empty test set");
    const auto mask = dead_output_mask(pipe.net());
    const auto* excluded = mask.empty() ? nullptr : &mask;

    EvalResult res;
    std::size_t correct = 0;
    for (std::size_t idx = 0; idx < test.count(); ++idx) {
        auto fr = pipe.forward(test.image(idx), mix_seed(kEvalTag, idx));
        Prediction p;
        switch (decoder) {
        case Decoder::Vote:
            p = predict_vote(fr.final_output.counts, labels.la, excluded);
            break;
        case Decoder::Vfa:
            p = predict_vfa(fr.final_output.counts, labels.la, excluded);
            break;
        case Decoder::Bigram:
            p = predict_bigram(fr.final_output, labels.bigram, labels.la,
                               excluded);
            break;
        }
        if (p.no_spike) res.no_spike++;
        res.confusion[test.labels[idx]][p.cls]++;
        if (p.cls == test.labels[idx]) correct++;
    }
    res.accuracy = static_cast<double>(correct) / test.count();
    return res;
}

std::vector<RobustnessRow> robustness_sweep(
    const Network& trained, const TrainConfig& cfg, const Dataset& test,
    const LabelingResult& labels, Decoder decoder,
    const std::vector<double>& rhos, AblateMode mode, std::uint32_t trials,
    std::uint64_t seed, double lambda) {
    std::vector<RobustnessRow> rows;
    for (double rho : rhos) {
        std::vector<double> accs;
        for (std::uint32_t trial = 0; trial < trials; ++trial) {
            Network copy = trained;
            ablate(copy, rho, mode, mix_seed(seed, trial));
            Pipeline p(copy, cfg);
            if (lambda > 0.0) p.encoder().lambda = lambda;
            accs.push_back(evaluate(p, test, labels, decoder).accuracy);
        }
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= accs.size();
        double var = 0.0;
        for (double a : accs) var += (a - mean) * (a - mean);
        rows.push_back({rho, mean,
                        accs.size() > 1 ? std::sqrt(var / (accs.size() - 1))
                                        : 0.0});
    }
    return rows;
}

IntensityReport measure_intensity(Pipeline& pipe, const Dataset& data,
                                  std::size_t n_images) {
    IntensityReport rep;
    n_images = std::min(n_images, data.count());
    if (n_images == 0) return rep;
    const std::uint32_t stages = pipe.net().spec.stage_count();
    std::vector<double> in(stages, 0.0), out(stages, 0.0);
    rep.min_final_output = UINT64_MAX;
    for (std::size_t idx = 0; idx < n_images; ++idx) {
        auto fr = pipe.forward(data.image(idx), mix_seed(0x1f7e, idx));
        for (std::uint32_t s = 0; s < stages; ++s) {
            in[s] += static_cast<double>(fr.stage_input[s]);
            out[s] += static_cast<double>(fr.stage_output[s]);
        }
        if (fr.flagged)
            rep.flagged++;
        else
            rep.min_final_output =
                std::min(rep.min_final_output, fr.final_output.total());
    }
    if (rep.min_final_output == UINT64_MAX) rep.min_final_output = 0;
    for (std::uint32_t s = 0; s < stages; ++s)
        rep.rows.push_back({s, in[s] / n_images, out[s] / n_images});
    return rep;
}

double sds(const std::vector<double>& img1, const std::vector<double>& img2) {
    if (img1.size() != img2.size() || img1.empty())
        throw ConfigError("sds: images must share a positive size");
    double s1 = 0.0, s2 = 0.0;
    for (double v : img1) {
        if (v < 0) throw ConfigError("sds: negative pixel value");
        s1 += v;
    }
    for (double v : img2) {
        if (v < 0) throw ConfigError("sds: negative pixel value");
        s2 += v;
    }
    if (s1 <= 0 || s2 <= 0)
        throw ConfigError("sds: all-zero image has no mean-1 normalization");
    // normalize each image to mean pixel value 1
    const double n1 = img1.size() / s1, n2 = img2.size() / s2;
    double l1 = 0.0;
    for (std::size_t k = 0; k < img1.size(); ++k)
        l1 += std::abs(img1[k] * n1 - img2[k] * n2);
    return 1.0 - l1 / (2.0 * static_cast<double>(img1.size()));
}

double msds(const std::vector<std::vector<double>>& set1,
            const std::vector<std::vector<double>>& set2) {
    if (set1.empty() || set2.empty())
        throw ConfigError("msds: both sets must be non-empty");
    double acc = 0.0;
    for (std::size_t i = 0; i < set1.size(); ++i)
        for (std::size_t j = 0; j < set2.size(); ++j) {
            try {
                acc += sds(set1[i], set2[j]);
            } catch (const ConfigError& e) {
                throw ConfigError("msds: pair (" + std::to_string(i) + ", " +
                                  std::to_string(j) + "): " + e.what());
            }
        }
    return acc / (static_cast<double>(set1.size()) * set2.size());
}

std::vector<std::uint32_t> spiking_map(Pipeline& pipe, std::uint32_t stage,
                                       const std::uint8_t* image,
                                       std::uint64_t image_key) {
    auto fr = pipe.forward(image, image_key, true);
    return fr.input_maps.at(stage);
}

MsdsReport msds_report(Pipeline& pipe, std::uint32_t stage,
                       const Dataset& data, std::size_t per_class) {
    std::array<std::size_t, kClassCount> taken{};
    MsdsReport rep;
    rep.class_maps.assign(kClassCount, {});
    for (std::size_t idx = 0; idx < data.count(); ++idx) {
        const std::uint8_t cls = data.labels[idx];
        if (taken[cls] >= per_class) continue;
        auto map = spiking_map(pipe, stage, data.image(idx),
                               mix_seed(0x3d5, idx));
        std::uint64_t total = 0;
        for (std::uint32_t v : map) total += v;
        if (total == 0) continue; // silent presentation: no spatial signal
        taken[cls]++;
        if (rep.class_maps[cls].empty())
            rep.class_maps[cls].assign(map.size(), 0.0);
        for (std::size_t k = 0; k < map.size(); ++k)
            rep.class_maps[cls][k] += map[k];
    }
    for (std::uint32_t c = 0; c < kClassCount; ++c) {
        if (taken[c] == 0)
            throw ConfigError("msds_report: no informative images for class " +
                              std::to_string(c));
        for (double& v : rep.class_maps[c]) v /= static_cast<double>(taken[c]);
    }
    double off = 0.0;
    for (std::uint32_t a = 0; a < kClassCount; ++a)
        for (std::uint32_t b = 0; b < kClassCount; ++b) {
            rep.matrix[a][b] = sds(rep.class_maps[a], rep.class_maps[b]);
            if (a != b) off += rep.matrix[a][b];
        }
    rep.off_diagonal_mean = off / (kClassCount * (kClassCount - 1));
    return rep;
}

} // namespace spikecept
