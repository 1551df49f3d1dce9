#include "spikecept/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spikecept {

SpikeTrain encode_image(const std::uint8_t* pixels, double lambda, double dt,
                        std::uint32_t steps, Rng& rng) {
    SpikeTrain train(steps);
    // per-pixel per-step spike probabilities
    std::array<double, 256> prob{};
    for (int p = 0; p < 256; ++p)
        prob[p] = std::min(1.0, p * lambda * dt * 1e-3);
    std::vector<std::uint16_t> active;
    for (std::uint32_t i = 0; i < kPixelCount; ++i)
        if (pixels[i] > 0) active.push_back(static_cast<std::uint16_t>(i));
    for (std::uint32_t step = 0; step < steps; ++step) {
        for (std::uint16_t i : active)
            if (rng.next_double() < prob[pixels[i]]) train.indices.push_back(i);
        train.offsets[step + 1] = static_cast<std::uint32_t>(train.indices.size());
    }
    return train;
}

LabelAssignment assign_labels(
    const std::vector<std::vector<std::uint64_t>>& responses,
    const std::vector<std::uint8_t>& labels) {
    if (responses.size() != labels.size())
        throw ConfigError("assign_labels: responses/labels size mismatch");
    if (responses.empty())
        throw ConfigError("assign_labels: no labeled responses");
    std::array<std::uint64_t, kClassCount> per_class{};
    for (std::uint8_t l : labels) {
        if (l >= kClassCount)
            throw ConfigError("assign_labels: label out of range");
        per_class[l]++;
    }
    std::string missing;
    for (std::uint32_t c = 0; c < kClassCount; ++c)
        if (per_class[c] == 0)
            missing += (missing.empty() ? "" : ", ") + std::to_string(c);
    if (!missing.empty())
        throw ConfigError("assign_labels: no examples for classes: " + missing);

    const std::size_t n = responses.front().size();
    LabelAssignment la;
    la.response_matrix.assign(n, {});
    for (std::size_t img = 0; img < responses.size(); ++img) {
        if (responses[img].size() != n)
            throw ConfigError("assign_labels: ragged response rows");
        for (std::size_t i = 0; i < n; ++i)
            la.response_matrix[i][labels[img]] +=
                static_cast<double>(responses[img][i]);
    }
    la.neuron_label.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1.0;
        std::uint32_t best_c = 0;
        bool any = false;
        for (std::uint32_t c = 0; c < kClassCount; ++c) {
            la.response_matrix[i][c] /= static_cast<double>(per_class[c]);
            if (la.response_matrix[i][c] > best) {
                best = la.response_matrix[i][c];
                best_c = c;
            }
            if (la.response_matrix[i][c] > 0) any = true;
        }
        la.neuron_label[i] = best_c; // ties fall to the lowest class index
        if (!any) la.silent_neurons++;
    }
    return la;
}

namespace {
Prediction argmax_scores(const std::array<double, kClassCount>& score,
                         bool no_spike) {
    Prediction p;
    p.no_spike = no_spike;
    double best = score[0];
    for (std::uint32_t c = 1; c < kClassCount; ++c)
        if (score[c] > best) {
            best = score[c];
            p.cls = c;
        }
    return p;
}
bool skip(std::uint32_t i, const std::vector<std::uint8_t>* excluded) {
    return excluded && !excluded->empty() && (*excluded)[i];
}
} // namespace

Prediction predict_vote(const std::vector<std::uint64_t>& counts,
                        const LabelAssignment& la,
                        const std::vector<std::uint8_t>* excluded) {
    if (counts.size() != la.size())
        throw ConfigError("predict_vote: record does not cover output layer");
    std::array<double, kClassCount> sum{}, n{};
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < counts.size(); ++i) {
        if (skip(i, excluded)) continue;
        sum[la.neuron_label[i]] += static_cast<double>(counts[i]);
        n[la.neuron_label[i]] += 1.0;
        total += counts[i];
    }
    std::array<double, kClassCount> score{};
    for (std::uint32_t c = 0; c < kClassCount; ++c)
        score[c] = n[c] > 0 ? sum[c] / n[c] : 0.0;
    return argmax_scores(score, total == 0);
}

Prediction predict_vfa(const std::vector<std::uint64_t>& counts,
                       const LabelAssignment& la,
                       const std::vector<std::uint8_t>* excluded) {
    if (counts.size() != la.size())
        throw ConfigError("predict_vfa: record does not cover output layer");
    std::array<double, kClassCount> score{};
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < counts.size(); ++i) {
        if (skip(i, excluded) || counts[i] == 0) continue;
        total += counts[i];
        double row = 0.0;
        for (double v : la.response_matrix[i]) row += v;
        if (row <= 0) continue;
        for (std::uint32_t c = 0; c < kClassCount; ++c)
            score[c] += static_cast<double>(counts[i]) *
                        (la.response_matrix[i][c] / row);
    }
    return argmax_scores(score, total == 0);
}

std::vector<std::uint32_t> spike_sequence(const SpikeRecord& rec) {
    std::vector<std::uint32_t> seq;
    for (const auto& [t, idx] : rec.per_step) {
        auto sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        for (std::uint32_t i : sorted)
            if (seq.empty() || seq.back() != i) seq.push_back(i);
    }
    return seq;
}

void fit_bigram(BigramModel& model, const SpikeRecord& rec,
                std::uint8_t label) {
    if (label >= kClassCount)
        throw ConfigError("fit_bigram: label out of range");
    const auto seq = spike_sequence(rec);
    for (std::size_t k = 1; k < seq.size(); ++k)
        model.counts[{seq[k - 1], seq[k]}][label]++;
}

Prediction predict_bigram(const SpikeRecord& rec, const BigramModel& model,
                          const LabelAssignment& la,
                          const std::vector<std::uint8_t>* excluded) {
    const auto seq = spike_sequence(rec);
    std::array<double, kClassCount> score{};
    bool any = false;
    for (std::size_t k = 1; k < seq.size(); ++k) {
        auto it = model.counts.find({seq[k - 1], seq[k]});
        if (it == model.counts.end()) continue;
        any = true;
        for (std::uint32_t c = 0; c < kClassCount; ++c)
            score[c] += it->second[c];
    }
    if (!any) return predict_vote(rec.counts, la, excluded);
    return argmax_scores(score, false);
}

} // namespace spikecept
