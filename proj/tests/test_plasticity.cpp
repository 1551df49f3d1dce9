#include <doctest.h>

#include <cmath>

#include "spikecept/projection.hpp"
#include "spikecept/rng.hpp"

using namespace spikecept;

namespace {

Projection make_pair_projection(const PlasticityParams& pp) {
    // one pre neuron fully connected to one post neuron
    return Projection(1, 1, +1, true, pp, {{0}});
}

} // namespace

TEST_CASE("pair-based potentiation and depression match frozen values") {
    PlasticityParams pp;
    Projection proj = make_pair_projection(pp);
    proj.bind_dt(0.5);
    proj.weights()[0] = 0.5;

    SUBCASE("pre then post 5 steps later: dw = eta_post * exp(-2.5/20)") {
        proj.on_pre_spike(0, 0);
        proj.on_post_spike(0, 5);
        CHECK(proj.weight(0) ==
              doctest::Approx(0.5 + 0.008824969025845954).epsilon(1e-12));
    }
    SUBCASE("post then pre 8 steps later: dw = -eta_pre * exp(-4/20)") {
        proj.on_post_spike(0, 0);
        proj.on_pre_spike(0, 8);
        CHECK(proj.weight(0) ==
              doctest::Approx(0.5 - 8.187307530779819e-05).epsilon(1e-12));
    }
    SUBCASE("simultaneous pre and post (pre applied first) potentiates fully") {
        proj.on_pre_spike(0, 3);
        proj.on_post_spike(0, 3);
        CHECK(proj.weight(0) == doctest::Approx(0.5 + 0.01).epsilon(1e-12));
    }
    SUBCASE("no prior event leaves the weight untouched") {
        proj.on_post_spike(0, 10); // x_pre still zero
        CHECK(proj.weight(0) == 0.5);
    }
}

TEST_CASE("weights are clipped to [w_min, w_max]") {
    PlasticityParams pp;
    Projection proj = make_pair_projection(pp);
    proj.bind_dt(0.5);
    proj.weights()[0] = 0.999;
    for (int s = 0; s < 10; ++s) {
        proj.on_pre_spike(0, 2 * s);
        proj.on_post_spike(0, 2 * s);
    }
    CHECK(proj.weight(0) == 1.0);

    // lower clip: depress from just above zero with no recent pre trace
    PlasticityParams strong;
    strong.eta_pre = 0.001;
    Projection proj2 = make_pair_projection(strong);
    proj2.bind_dt(0.5);
    proj2.weights()[0] = 0.0005;
    proj2.on_post_spike(0, 5000); // x_pre long gone: no potentiation
    proj2.on_pre_spike(0, 5001);  // dw = -0.001 * exp(-0.5/20)
    CHECK(proj2.weight(0) == 0.0);
}

TEST_CASE("frozen projection updates traces but not weights") {
    PlasticityParams pp;
    Projection proj = make_pair_projection(pp);
    proj.bind_dt(0.5);
    proj.weights()[0] = 0.5;
    proj.freeze();
    proj.on_pre_spike(0, 0);
    proj.on_post_spike(0, 2);
    CHECK(proj.weight(0) == 0.5);
    CHECK(proj.trace_pre(0, 2) > 0.0);
    proj.unfreeze();
    proj.on_post_spike(0, 4);
    CHECK(proj.weight(0) > 0.5);
}

TEST_CASE("event-driven traces match a dense per-step simulation") {
    // 100 random spike-train pairs, 1000 steps each. The dense oracle
    // multiplies every trace by the decay factor every step; the
    // projection under test decays lazily through its power table.
    PlasticityParams pp;
    const double dt = 0.5;
    const double f_pre = std::exp(-dt / pp.tau_pre);
    const double f_post = std::exp(-dt / pp.tau_post);

    double max_err = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(mix_seed(0xd15e, trial));
        Projection proj = make_pair_projection(pp);
        proj.bind_dt(dt);
        proj.weights()[0] = 0.5;

        double w = 0.5, x_pre = 0.0, x_post = 0.0;
        const auto clip = [&](double v) {
            return v < pp.w_min ? pp.w_min : (v > pp.w_max ? pp.w_max : v);
        };
        for (int step = 0; step < 1000; ++step) {
            x_pre *= f_pre;
            x_post *= f_post;
            const bool pre = rng.bernoulli(0.08);
            const bool post = rng.bernoulli(0.05);
            if (pre) {
                if (x_post != 0.0) w = clip(w - pp.eta_pre * x_post);
                x_pre = 1.0;
                proj.on_pre_spike(0, step);
            }
            if (post) {
                if (x_pre != 0.0) w = clip(w + pp.eta_post * x_pre);
                x_post = 1.0;
                proj.on_post_spike(0, step);
            }
            max_err = std::max(max_err, std::abs(proj.weight(0) - w));
        }
        CHECK(std::abs(proj.weight(0) - w) <= 1e-9);
        CHECK(std::abs(proj.trace_pre(0, 1000) - x_pre * f_pre) <= 1e-9);
    }
    CHECK(max_err <= 1e-9);
}

TEST_CASE("normalize_incoming rescales to the target and reports zero rows") {
    PlasticityParams pp;
    // two post neurons: post 0 has three inputs, post 1 has two
    Projection proj(3, 2, +1, true, pp, {{0, 1, 2}, {0, 2}});
    proj.bind_dt(0.5);
    auto& w = proj.weights();
    w[0] = 0.2; w[1] = 0.3; w[2] = 0.5; // post 0
    w[3] = 0.0; w[4] = 0.0;             // post 1, zero row
    const std::size_t skipped = proj.normalize_incoming(2.0);
    CHECK(skipped == 1);
    CHECK(proj.incoming_sum(0) == doctest::Approx(2.0));
    CHECK(w[0] == doctest::Approx(0.4));
    CHECK(proj.incoming_sum(1) == 0.0);
}

TEST_CASE("deliver respects sign, dead and refractory targets") {
    PlasticityParams pp;
    Projection exc(1, 3, +1, false, pp, {{0}, {0}, {0}});
    exc.weights() = {1.5, 2.0, 2.5};
    LIFParams lp;
    NeuronPopulation pop(3, lp);
    pop.kill(1);
    exc.deliver(0, pop, 0.0);
    CHECK(pop.current(0) == 1.5);
    CHECK(pop.current(1) == 0.0); // dead
    CHECK(pop.current(2) == 2.5);

    // refractory target is skipped
    NeuronPopulation pop2(3, lp);
    pop2.inject(0, 1e4);
    pop2.step_voltage(0.0, 0.5);
    REQUIRE(pop2.spiked(0));
    const double before = pop2.current(0);
    exc.deliver(0, pop2, 0.5);
    CHECK(pop2.current(0) == before);
    CHECK(pop2.current(2) == 2.5);
}

TEST_CASE("killing connections and postsynaptic rows") {
    PlasticityParams pp;
    Projection proj(2, 2, +1, true, pp, {{0, 1}, {0, 1}});
    proj.bind_dt(0.5);
    proj.weights() = {0.1, 0.2, 0.3, 0.4};
    CHECK(proj.live_connection_count() == 4);
    proj.kill_connection(1);
    CHECK(proj.live_connection_count() == 3);
    CHECK(proj.weight(1) == 0.0);
    proj.kill_post(1);
    CHECK(proj.live_connection_count() == 1);
    // dead connections are excluded from plasticity and normalization
    proj.on_pre_spike(0, 0);
    proj.on_post_spike(1, 0);
    CHECK(proj.weight(2) == 0.0);
    CHECK(proj.incoming_sum(1) == 0.0);
}

TEST_CASE("parameter validation") {
    PlasticityParams pp;
    pp.eta_pre = 0.005; // violates eta_post >= 10 * eta_pre
    CHECK_THROWS_AS(pp.validate(), ConfigError);
    pp = PlasticityParams{};
    pp.w_min = 0.5;
    pp.w_max = 0.4;
    CHECK_THROWS_AS(pp.validate(), ConfigError);
    pp = PlasticityParams{};
    pp.tau_pre = 0.0;
    CHECK_THROWS_AS(pp.validate(), ConfigError);
}

TEST_CASE("inhibition group arithmetic and delivery") {
    InhibitionGroup inh{2, 3, 10.0}; // 2 locations, 3 features
    CHECK(inh.synapse_count() == 2 * 3 * 2);
    LIFParams lp;
    NeuronPopulation pop(6, lp);
    inh.deliver(4, pop, 0.0); // location 1, feature 1
    CHECK(pop.current(3) == -10.0);
    CHECK(pop.current(4) == 0.0); // self
    CHECK(pop.current(5) == -10.0);
    CHECK(pop.current(0) == 0.0); // other location untouched
}
