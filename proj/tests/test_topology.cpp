#include <doctest.h>

#include "spikecept/topology.hpp"

using namespace spikecept;

namespace {

PathwaySpec fc(std::uint32_t F) {
    PathwaySpec p;
    p.kind = PathwayKind::FC;
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

NetworkSpec single(std::vector<PathwaySpec> ps) {
    NetworkSpec n;
    ModuleSpec m;
    m.pathways = std::move(ps);
    n.modules.push_back(std::move(m));
    return n;
}

} // namespace

TEST_CASE("pathway geometry") {
    CHECK(lc(16, 6, 100).positions_per_dim() == 3);
    CHECK(lc(24, 4, 112).positions_per_dim() == 2);
    CHECK(lc(10, 6, 448).positions_per_dim() == 4);
    CHECK(fc(400).positions_per_dim() == 1);
    CHECK(lc(16, 6, 100).neuron_count() == 900);
}

TEST_CASE("per-pathway synapse breakdown of the three-pathway F=112 module") {
    CHECK(fc(112).plastic_synapse_count(1) == 87808);
    CHECK(fc(112).inhibitory_synapse_count() == 12432);
    CHECK(lc(24, 4, 112).plastic_synapse_count(1) == 258048);
    CHECK(lc(24, 4, 112).inhibitory_synapse_count() == 49728);
    CHECK(lc(16, 6, 112).plastic_synapse_count(1) == 258048);
    CHECK(lc(16, 6, 112).inhibitory_synapse_count() == 111888);

    ModuleSpec m;
    m.pathways = {fc(112), lc(24, 4, 112), lc(16, 6, 112)};
    CHECK(m.neuron_count() == 1568);
    CHECK(m.synapse_count(1) == 777952);
}

TEST_CASE("FC is the k=28 single-location special case of LC") {
    const PathwaySpec a = fc(64);
    const PathwaySpec b = lc(28, 1, 64);
    CHECK(a.neuron_count() == b.neuron_count());
    CHECK(a.plastic_synapse_count(1) == b.plastic_synapse_count(1));
    CHECK(a.receptive_field(0, 0, 1) == b.receptive_field(0, 0, 1));
}

TEST_CASE("receptive field layout is row-major, channel-minor") {
    const auto rf = lc(2, 2, 1).receptive_field(1, 0, 2);
    // location (1,0): x0 = 2, y0 = 0, 2x2 window, 2 channels
    CHECK(rf == std::vector<std::uint32_t>{4, 5, 6, 7, 60, 61, 62, 63});
}

TEST_CASE("PRA pool factor derivation") {
    PRASpec pra;
    pra.channels = 2;
    CHECK(pra.pool_factor(1568) == 1);
    CHECK(pra.pool_factor(3136) == 2);
    CHECK(pra.pool_factor(6272) == 4);
    pra.channels = 1;
    CHECK(pra.pool_factor(784) == 1); // identity pooling

    pra.channels = 2;
    try {
        pra.pool_factor(2352); // = 784 * 3, only C = 1, 3 divide
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("valid C: 1, 3") != std::string::npos);
    }
}

TEST_CASE("resource accounting over single-module specs") {
    CHECK(count_resources(single({fc(400)})).n_synapse == 473200);
    CHECK(count_resources(single({fc(6400)})).n_synapse == 45971200);
    CHECK(count_resources(single({lc(16, 6, 1000)})).n_synapse == 11295000);
    const auto st = count_resources(
        single({fc(448), lc(24, 4, 448), lc(16, 6, 448), lc(10, 6, 448)}));
    CHECK(st.n_neuron == 13440);
    CHECK(st.n_synapse == 9140096);
}

TEST_CASE("stacked accounting includes pooling synapses and C=2 fan-in") {
    NetworkSpec n;
    for (std::uint32_t F : {112u, 224u}) {
        ModuleSpec m;
        m.pathways = {fc(F), lc(24, 4, F), lc(16, 6, F)};
        n.modules.push_back(std::move(m));
    }
    n.pras.assign(1, PRASpec{});
    const auto per_stage = count_resources_per_stage(n);
    REQUIRE(per_stage.size() == 2);
    CHECK(per_stage[0].n_neuron == 1568);
    CHECK(per_stage[0].n_synapse == 777952);
    CHECK(per_stage[1].n_neuron == 4704);
    // 777,952 + 1,568 pooling + the F=224 module with doubled fan-in
    CHECK(per_stage[1].n_synapse == 3894464);
}

TEST_CASE("module validation") {
    ModuleSpec empty;
    CHECK_THROWS_AS(empty.validate(), ConfigError);

    ModuleSpec no_fc;
    no_fc.pathways = {lc(16, 6, 10), lc(24, 4, 10)};
    CHECK_THROWS_AS(no_fc.validate(), ConfigError);

    ModuleSpec lone_lc; // plain baseline-LC is fine
    lone_lc.pathways = {lc(16, 6, 10)};
    CHECK_NOTHROW(lone_lc.validate());

    ModuleSpec unbalanced;
    unbalanced.pathways = {fc(10), lc(16, 6, 20)};
    CHECK_THROWS_AS(unbalanced.validate(), ConfigError);
    unbalanced.balanced = false; // naive version allows unequal F
    CHECK_NOTHROW(unbalanced.validate());
}

TEST_CASE("build_network normalizes weights and is seed-deterministic") {
    NetworkSpec spec = single({fc(8), lc(16, 6, 8)});
    LIFParams lif;
    PlasticityParams plast;
    Network a = build_network(spec, lif, plast, 7);
    Network b = build_network(spec, lif, plast, 7);
    Network c = build_network(spec, lif, plast, 8);

    const auto& fcw = a.stages[0].pathways[0].ff;
    for (std::uint32_t j = 0; j < fcw.n_post(); ++j)
        CHECK(fcw.incoming_sum(j) == doctest::Approx(0.1 * 784).epsilon(1e-9));
    const auto& lcw = a.stages[0].pathways[1].ff;
    CHECK(lcw.incoming_sum(0) == doctest::Approx(0.1 * 256).epsilon(1e-9));

    CHECK(a.stages[0].pathways[0].ff.weights() ==
          b.stages[0].pathways[0].ff.weights());
    CHECK(a.stages[0].pathways[0].ff.weights() !=
          c.stages[0].pathways[0].ff.weights());
}

TEST_CASE("concatenated output indexing") {
    NetworkSpec spec = single({fc(8), lc(16, 6, 8)});
    Network net = build_network(spec, LIFParams{}, PlasticityParams{}, 1);
    CHECK(net.output_size() == 8 + 72);
    CHECK(net.stages[0].locate(3) == std::pair<std::uint32_t, std::uint32_t>{0, 3});
    CHECK(net.stages[0].locate(8) == std::pair<std::uint32_t, std::uint32_t>{1, 0});
    CHECK(net.stages[0].locate(79) ==
          std::pair<std::uint32_t, std::uint32_t>{1, 71});
}

TEST_CASE("ablation removes the expected fraction") {
    NetworkSpec spec = single({fc(64)});
    Network net = build_network(spec, LIFParams{}, PlasticityParams{}, 1);
    const std::size_t total = net.live_plastic_synapses();
    REQUIRE(total == 784 * 64);

    SUBCASE("rho = 0 is a no-op") {
        ablate(net, 0.0, AblateMode::Synapses, 5);
        CHECK(net.live_plastic_synapses() == total);
        CHECK(net.dead_output_neurons() == 0);
    }
    SUBCASE("rho = 1 removes everything") {
        ablate(net, 1.0, AblateMode::Neurons, 5);
        CHECK(net.dead_output_neurons() == 64);
        CHECK(net.live_plastic_synapses() == 0);
    }
    SUBCASE("rho = 0.25 synapse deletion is binomial around the mean") {
        ablate(net, 0.25, AblateMode::Synapses, 5);
        const double removed = double(total - net.live_plastic_synapses());
        // 4-sigma window around n * rho
        const double mean = total * 0.25;
        const double sigma = std::sqrt(total * 0.25 * 0.75);
        CHECK(removed > mean - 4 * sigma);
        CHECK(removed < mean + 4 * sigma);
    }
    SUBCASE("neuron ablation leaves no dangling live synapse") {
        ablate(net, 0.5, AblateMode::Neurons, 5);
        const auto& bp = net.stages[0].pathways[0];
        for (std::uint32_t c = 0; c < 784 * 64; ++c)
            if (!bp.ff.conn_dead(c)) CHECK_FALSE(bp.pop.is_dead(c / 784));
    }
}

TEST_CASE("network spec validation") {
    NetworkSpec spec = single({fc(8)});
    spec.pras.assign(1, PRASpec{}); // PRA without a second module
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    NetworkSpec two = single({fc(8)});
    ModuleSpec m2;
    m2.pathways = {fc(8)};
    two.modules.push_back(m2); // missing PRA between the modules
    CHECK_THROWS_AS(two.validate(), ConfigError);
}
