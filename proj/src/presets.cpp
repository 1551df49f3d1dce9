#include "spikecept/presets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace spikecept {

namespace {

PathwaySpec fc(std::uint32_t F) {
    PathwaySpec p;
    p.kind = PathwayKind::FC;
    p.k = kInputSide;
    p.s = 1;
    p.F = F;
    return p;
}

PathwaySpec lc(std::uint32_t k, std::uint32_t s, std::uint32_t F) {
    PathwaySpec p;
    p.kind = PathwayKind::LC;
    p.k = k;
    p.s = s;
    p.F = F;
    return p;
}

ModuleSpec module(std::vector<PathwaySpec> pathways) {
    ModuleSpec m;
    m.pathways = std::move(pathways);
    return m;
}

// The three-pathway inception composition used by most variants.
ModuleSpec inception3(std::uint32_t F) {
    return module({fc(F), lc(24, 4, F), lc(16, 6, F)});
}

// The wide variant: four FC and two LC(24,4) pathways.
ModuleSpec inception7(std::uint32_t F) {
    return module({fc(F), fc(F), fc(F), fc(F), lc(24, 4, F), lc(24, 4, F),
                   lc(16, 6, F)});
}

// The deep-row variant with the extra LC(10,6) pathway.
ModuleSpec inception4(std::uint32_t F) {
    return module({fc(F), lc(24, 4, F), lc(16, 6, F), lc(10, 6, F)});
}

FullConfig single_module(ModuleSpec m) {
    FullConfig fc;
    fc.network.modules.push_back(std::move(m));
    return fc;
}

// Settings that make the small networks learn in minutes: a stronger
// encoder and input drive compensate for the 1 ms current decay, and the
// soft inhibition is scaled so one winner suppresses its whole location.
void desk_tune(FullConfig& fc) {
    fc.network.encoder.lambda = 2.0;
    fc.network.encoder.lambda_step = 0.5;
    fc.network.encoder.lambda_max = 8.0;
    for (auto& m : fc.network.modules) m.w_inh = 2000.0;
    fc.train.plast.c_norm = -0.3; // 0.3 * fan-in per neuron
    // Winners must rotate within a few thousand presentations, so the
    // threshold adaptation is much coarser than at full scale and the
    // adaptation relaxes over a few hundred presentations.
    fc.train.lif.theta_plus = 0.2;
    fc.train.lif.tau_theta = 2e5;
    // The sparse desk-scale module output needs a much wider pooling
    // weight range before the downstream module sees any drive.
    for (auto& q : fc.network.pras) {
        q.w_p_init = 10.0;
        q.w_p_step = 10.0;
        q.w_p_max = 500.0;
    }
    fc.train.seed = 1;
}

FullConfig make_preset(const std::string& name) {
    if (name == "fc-400") return single_module(module({fc(400)}));
    if (name == "fc-800") return single_module(module({fc(800)}));
    if (name == "fc-1600") return single_module(module({fc(1600)}));
    if (name == "fc-6400") return single_module(module({fc(6400)}));
    if (name == "lc-100") return single_module(module({lc(16, 6, 100)}));
    if (name == "lc-400") return single_module(module({lc(16, 6, 400)}));
    if (name == "lc-800") return single_module(module({lc(16, 6, 800)}));
    if (name == "lc-1000") return single_module(module({lc(16, 6, 1000)}));
    if (name == "sp-inception-i") return single_module(inception3(112));
    if (name == "sp-inception-ii") return single_module(inception3(224));
    if (name == "sp-inception-iii") return single_module(inception7(300));
    if (name == "sp-inception-iv") return single_module(inception3(448));
    if (name == "sp-inception-v") return single_module(inception7(400));
    if (name == "sp-inception-vi") return single_module(inception4(448));
    if (name == "table-ii-stack") {
        FullConfig fc;
        fc.network.modules = {inception3(112), inception3(224), inception3(448),
                              inception4(448)};
        fc.network.pras.assign(3, PRASpec{});
        return fc;
    }
    if (name == "desk-fc-100") {
        FullConfig fc = single_module(module({spikecept::fc(100)}));
        desk_tune(fc);
        return fc;
    }
    if (name == "desk-sp-inception-64") {
        FullConfig fc = single_module(inception3(64));
        desk_tune(fc);
        return fc;
    }
    if (name == "desk-two-stage") {
        FullConfig fc;
        // stage-1 output must tile the 28x28xC PRA grid: 14 * 112 = 784 * 2
        fc.network.modules = {inception3(112), inception3(64)};
        fc.network.pras.assign(1, PRASpec{});
        desk_tune(fc);
        // The second module learns from the sparse PRA code, so stage 1
        // keeps many winners (weak inhibition) and the stacked stage gets
        // a matching normalization target and weight cap.
        fc.network.modules[0].w_inh = 100.0;
        fc.train.plast.c_norm_stacked = -5.0;
        fc.train.plast.w_max_stacked = 20.0;
        // Thin digits need a much stronger encoder before any stage-1
        // neuron fires, or their pooled signal never reaches stage 2.
        fc.network.encoder.lambda_max = 30.0;
        return fc;
    }
    throw ConfigError("unknown preset: " + name);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"fc-400",         "fc-800",
            "fc-1600",        "fc-6400",
            "lc-100",         "lc-400",
            "lc-800",         "lc-1000",
            "sp-inception-i", "sp-inception-ii",
            "sp-inception-iii", "sp-inception-iv",
            "sp-inception-v", "sp-inception-vi",
            "table-ii-stack", "desk-fc-100",
            "desk-sp-inception-64", "desk-two-stage"};
}

bool is_preset(const std::string& name) {
    const auto names = preset_names();
    return std::find(names.begin(), names.end(), lower(name)) != names.end();
}

FullConfig preset_config(const std::string& name) {
    FullConfig fc = make_preset(lower(name));
    fc.network.validate();
    fc.train.validate();
    return fc;
}

FullConfig load_config(const std::string& path_or_preset) {
    if (is_preset(path_or_preset)) return preset_config(path_or_preset);
    std::ifstream in(path_or_preset);
    if (!in)
        throw ConfigError("no such preset or config file: " + path_or_preset);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace spikecept
