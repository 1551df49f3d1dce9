#include "spikecept/topology.hpp"

#include <algorithm>
#include <string>

namespace spikecept {

void PathwaySpec::validate() const {
    if (F == 0) throw ConfigError("pathway: F must be positive");
    if (kind == PathwayKind::FC) return;
    if (k == 0 || k > kInputSide)
        throw ConfigError("pathway: LC kernel must satisfy 1 <= k <= 28, got k=" +
                          std::to_string(k));
    if (s == 0) throw ConfigError("pathway: LC stride must be positive");
}

std::uint32_t PathwaySpec::positions_per_dim() const {
    if (kind == PathwayKind::FC) return 1;
    return (kInputSide - k) / s + 1;
}

std::vector<std::uint32_t> PathwaySpec::receptive_field(
    std::uint32_t lx, std::uint32_t ly, std::uint32_t channels) const {
    const std::uint32_t side = kind == PathwayKind::FC ? kInputSide : k;
    const std::uint32_t x0 = kind == PathwayKind::FC ? 0 : lx * s;
    const std::uint32_t y0 = kind == PathwayKind::FC ? 0 : ly * s;
    std::vector<std::uint32_t> rf;
    rf.reserve(static_cast<std::size_t>(side) * side * channels);
    for (std::uint32_t dy = 0; dy < side; ++dy)
        for (std::uint32_t dx = 0; dx < side; ++dx)
            for (std::uint32_t c = 0; c < channels; ++c)
                rf.push_back(((y0 + dy) * kInputSide + (x0 + dx)) * channels + c);
    return rf;
}

void ModuleSpec::validate() const {
    if (pathways.empty())
        throw ConfigError("module: at least one pathway required");
    bool has_fc = false;
    for (const auto& p : pathways) {
        p.validate();
        if (p.kind == PathwayKind::FC ||
            (p.k == kInputSide && p.kind == PathwayKind::LC))
            has_fc = true;
    }
    // Multi-pathway (inception) modules need a global-feature pathway;
    // a lone LC pathway is the plain baseline-LC module and is allowed.
    if (!has_fc && pathways.size() > 1)
        throw ConfigError("module: at least one FC pathway required");
    if (balanced) {
        for (const auto& p : pathways)
            if (p.F != pathways.front().F)
                throw ConfigError(
                    "module: balanced version requires equal F on all pathways");
    }
}

std::uint64_t ModuleSpec::neuron_count() const {
    std::uint64_t n = 0;
    for (const auto& p : pathways) n += p.neuron_count();
    return n;
}

std::uint64_t ModuleSpec::synapse_count(std::uint32_t channels) const {
    std::uint64_t n = 0;
    for (const auto& p : pathways)
        n += p.plastic_synapse_count(channels) + p.inhibitory_synapse_count();
    return n;
}

std::uint32_t PRASpec::pool_factor(std::uint64_t prev_output_size) const {
    const std::uint64_t out = output_size();
    if (prev_output_size == 0 || prev_output_size % out != 0) {
        std::string valid;
        for (std::uint32_t c = 1; c <= 16; ++c)
            if (prev_output_size % (784ull * c) == 0)
                valid += (valid.empty() ? "" : ", ") + std::to_string(c);
        throw ConfigError("PRA: upstream size " + std::to_string(prev_output_size) +
                          " is not divisible by 784*C with C=" +
                          std::to_string(channels) +
                          (valid.empty() ? " (no valid C <= 16)"
                                         : " (valid C: " + valid + ")"));
    }
    return static_cast<std::uint32_t>(prev_output_size / out);
}

void NetworkSpec::validate() const {
    if (modules.empty()) throw ConfigError("network: no modules");
    if (pras.size() + 1 != modules.size())
        throw ConfigError("network: need exactly one PRA per module after the first");
    for (const auto& m : modules) m.validate();
    for (std::uint32_t st = 1; st < modules.size(); ++st)
        pras[st - 1].pool_factor(modules[st - 1].neuron_count()); // throws if bad
    if (!(encoder.lambda > 0 && encoder.lambda <= encoder.lambda_max))
        throw ConfigError("network: require 0 < lambda <= lambda_max");
}

NetworkStats count_resources(const NetworkSpec& spec) {
    auto per = count_resources_per_stage(spec);
    return per.empty() ? NetworkStats{} : per.back();
}

std::vector<NetworkStats> count_resources_per_stage(const NetworkSpec& spec) {
    std::vector<NetworkStats> out;
    NetworkStats acc;
    for (std::uint32_t st = 0; st < spec.modules.size(); ++st) {
        const std::uint32_t channels = spec.input_channels(st);
        if (st > 0) acc.n_synapse += spec.modules[st - 1].neuron_count(); // pooling
        acc.n_neuron += spec.modules[st].neuron_count();
        acc.n_synapse += spec.modules[st].synapse_count(channels);
        out.push_back(acc);
    }
    return out;
}

std::pair<std::uint32_t, std::uint32_t> BuiltStage::locate(std::uint64_t out) const {
    for (std::uint32_t p = 0; p < pathways.size(); ++p) {
        const std::uint64_t base = pathways[p].concat_offset;
        if (out >= base && out < base + pathways[p].pop.size())
            return {p, static_cast<std::uint32_t>(out - base)};
    }
    throw ConfigError("locate: output index out of range");
}

Network build_network(const NetworkSpec& spec, const LIFParams& lif,
                      const PlasticityParams& plast, std::uint64_t seed) {
    spec.validate();
    Network net;
    net.spec = spec;

    for (std::uint32_t st = 0; st < spec.stage_count(); ++st) {
        BuiltStage stage;
        const std::uint32_t channels = spec.input_channels(st);
        stage.input_size = kInputSide * kInputSide * channels;

        if (st > 0) {
            BuiltPra pra;
            pra.spec = spec.pras[st - 1];
            pra.upstream_size = spec.modules[st - 1].neuron_count();
            pra.pool_factor = pra.spec.pool_factor(pra.upstream_size);
            pra.w_p = pra.spec.w_p_init;
            LIFParams pra_lif = lif;
            pra_lif.theta_plus = 0.0; // PRA units carry no homeostasis
            // Slow current decay turns pooled spike counts into sustained
            // firing rates, so the layer amplifies sparse upstream output.
            pra_lif.tau_I = pra.spec.tau_I;
            pra.pop = NeuronPopulation(pra.spec.output_size(), pra_lif);
            stage.pra = std::move(pra);
        }

        std::uint32_t offset = 0;
        for (const auto& pspec : spec.modules[st].pathways) {
            BuiltPathway bp;
            bp.spec = pspec;
            bp.concat_offset = offset;
            const std::uint32_t P = pspec.positions_per_dim();
            const std::uint64_t n_neurons = pspec.neuron_count();
            bp.pop = NeuronPopulation(n_neurons, lif);

            std::vector<std::vector<std::uint32_t>> conn(n_neurons);
            for (std::uint32_t ly = 0; ly < P; ++ly)
                for (std::uint32_t lx = 0; lx < P; ++lx) {
                    auto rf = pspec.receptive_field(lx, ly, channels);
                    const std::uint32_t loc = ly * P + lx;
                    for (std::uint32_t f = 0; f < pspec.F; ++f)
                        conn[loc * pspec.F + f] = rf;
                }

            PlasticityParams pp = plast;
            if (st > 0) {
                if (pp.c_norm_stacked != 0.0) pp.c_norm = pp.c_norm_stacked;
                if (pp.w_max_stacked > 0.0) pp.w_max = pp.w_max_stacked;
            }
            const double fan_in =
                static_cast<double>(pspec.k) * pspec.k * channels;
            // c_norm > 0: absolute incoming-sum target; 0: default
            // 0.1 * fan-in; < 0: |c_norm| * fan-in (scales across the
            // mixed receptive-field sizes of an inception module).
            if (pp.c_norm == 0.0)
                pp.c_norm = 0.1 * fan_in;
            else if (pp.c_norm < 0.0)
                pp.c_norm = -pp.c_norm * fan_in;
            bp.ff = Projection(stage.input_size,
                               static_cast<std::uint32_t>(n_neurons), +1, true,
                               pp, conn);

            // weight init: one stream per (seed, stage, pathway index)
            Rng rng(mix_seed(seed, 0x77e1, st, offset));
            for (double& w : bp.ff.weights()) w = rng.uniform(0.0, 0.3);
            bp.ff.normalize_incoming(pp.c_norm);

            bp.inh = InhibitionGroup{P * P, pspec.F, spec.modules[st].w_inh};
            offset += static_cast<std::uint32_t>(n_neurons);
            stage.pathways.push_back(std::move(bp));
        }
        stage.output_size = offset;
        net.stages.push_back(std::move(stage));
    }
    return net;
}

void ablate(Network& net, double rho_delete, AblateMode mode,
            std::uint64_t seed) {
    if (rho_delete < 0.0 || rho_delete > 1.0)
        throw ConfigError("ablate: rho must lie in [0, 1]");
    Rng rng(mix_seed(seed, 0xab1a7e));
    for (auto& stage : net.stages) {
        for (auto& bp : stage.pathways) {
            if (mode == AblateMode::Neurons) {
                for (std::uint32_t j = 0; j < bp.pop.size(); ++j)
                    if (rng.bernoulli(rho_delete)) {
                        bp.pop.kill(j);
                        bp.ff.kill_post(j); // no dangling synapses
                    }
            } else {
                for (std::uint32_t c = 0; c < bp.ff.connection_count(); ++c)
                    if (rng.bernoulli(rho_delete)) bp.ff.kill_connection(c);
            }
        }
    }
}

std::size_t Network::live_plastic_synapses() const {
    std::size_t n = 0;
    for (const auto& stage : stages)
        for (const auto& bp : stage.pathways) n += bp.ff.live_connection_count();
    return n;
}

std::size_t Network::dead_output_neurons() const {
    std::size_t n = 0;
    for (const auto& stage : stages)
        for (const auto& bp : stage.pathways) n += bp.pop.dead_count();
    return n;
}

} // namespace spikecept
