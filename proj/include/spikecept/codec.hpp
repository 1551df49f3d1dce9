#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "spikecept/engine.hpp"
#include "spikecept/rng.hpp"

namespace spikecept {

constexpr std::uint32_t kClassCount = 10;
constexpr std::uint32_t kPixelCount = kInputSide * kInputSide;

// Poisson rate encoder with adaptive intensity. lambda is in Hz per
// pixel unit; the per-step Bernoulli probability min(1, p * lambda * dt)
// approximates a Poisson process of rate p * lambda.
struct EncoderState {
    double lambda = 0.25;
    double lambda_step = 0.125;
    double lambda_max = 1.0;

    bool bump() {
        if (lambda >= lambda_max) return false;
        lambda = std::min(lambda + lambda_step, lambda_max);
        return true;
    }
};

SpikeTrain encode_image(const std::uint8_t* pixels, double lambda, double dt,
                        std::uint32_t steps, Rng& rng);

// Vote-based decoding state: per-neuron mean response per class from a
// labeled pass, and the argmax class responsibility.
struct LabelAssignment {
    std::vector<std::array<double, kClassCount>> response_matrix;
    std::vector<std::uint32_t> neuron_label;
    std::size_t silent_neurons = 0; // all-zero rows, labeled class 0

    std::size_t size() const { return neuron_label.size(); }
};

// responses[i] = per-neuron spike counts for image i. Every class must
// be represented at least once.
LabelAssignment assign_labels(
    const std::vector<std::vector<std::uint64_t>>& responses,
    const std::vector<std::uint8_t>& labels);

struct Prediction {
    std::uint32_t cls = 0;
    bool no_spike = false; // tie-break fallback fired
};

// Classic scheme: score(c) = mean count over neurons labeled c.
// `excluded` (optional) masks ablated neurons out of the vote.
Prediction predict_vote(const std::vector<std::uint64_t>& counts,
                        const LabelAssignment& la,
                        const std::vector<std::uint8_t>* excluded = nullptr);

// Vote-for-all variant: every neuron votes for all classes, weighted by
// its row-normalized response profile.
Prediction predict_vfa(const std::vector<std::uint64_t>& counts,
                       const LabelAssignment& la,
                       const std::vector<std::uint8_t>* excluded = nullptr);

// 2-gram decoder over ordered pairs of consecutive distinct firing
// neurons (simultaneous spikes ordered by ascending index).
struct BigramModel {
    std::map<std::pair<std::uint32_t, std::uint32_t>,
             std::array<std::uint32_t, kClassCount>>
        counts;
};

std::vector<std::uint32_t> spike_sequence(const SpikeRecord& rec);

void fit_bigram(BigramModel& model, const SpikeRecord& rec, std::uint8_t label);

// Falls back to predict_vote when no known pair occurs.
Prediction predict_bigram(const SpikeRecord& rec, const BigramModel& model,
                          const LabelAssignment& la,
                          const std::vector<std::uint8_t>* excluded = nullptr);

} // namespace spikecept
