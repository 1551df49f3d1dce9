#include <doctest.h>

#include <cmath>

#include "spikecept/harness.hpp"
#include "spikecept/rng.hpp"
#include "spikecept/synth.hpp"

using namespace spikecept;

TEST_CASE("sds basics") {
    SUBCASE("hand-computed value for (2,0) vs (1,1)") {
        CHECK(sds({2, 0}, {1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("identical images score 1") {
        CHECK(sds({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    }
    SUBCASE("disjoint supports score 0") {
        CHECK(sds({1, 0}, {0, 1}) == doctest::Approx(0.0));
    }
    SUBCASE("symmetry") {
        Rng rng(3);
        std::vector<double> a(16), b(16);
        for (auto& v : a) v = rng.next_double();
        for (auto& v : b) v = rng.next_double();
        CHECK(sds(a, b) == doctest::Approx(sds(b, a)).epsilon(1e-15));
    }
    SUBCASE("scale invariance") {
        std::vector<double> a = {0.5, 1.0, 2.5, 0.0};
        std::vector<double> b = {1.0, 1.0, 0.25, 3.0};
        std::vector<double> a7 = a;
        for (auto& v : a7) v *= 7.0;
        CHECK(sds(a, b) == doctest::Approx(sds(a7, b)).epsilon(1e-12));
    }
    SUBCASE("range stays in [0, 1] on random inputs") {
        for (int trial = 0; trial < 50; ++trial) {
            Rng rng(trial);
            std::vector<double> a(32), b(32);
            for (auto& v : a) v = rng.next_double();
            for (auto& v : b) v = rng.next_double();
            const double s = sds(a, b);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
    SUBCASE("all-zero image is rejected") {
        CHECK_THROWS_AS(sds({0, 0}, {1, 1}), ConfigError);
        CHECK_THROWS_AS(sds({1, 1}, {0, 0}), ConfigError);
    }
    SUBCASE("size mismatch is rejected") {
        CHECK_THROWS_AS(sds({1, 1}, {1, 1, 1}), ConfigError);
    }
}

TEST_CASE("msds equals the brute-force double loop") {
    Rng rng(11);
    std::vector<std::vector<double>> s1(4, std::vector<double>(9)),
        s2(4, std::vector<double>(9));
    for (auto& img : s1)
        for (auto& v : img) v = rng.next_double();
    for (auto& img : s2)
        for (auto& v : img) v = rng.next_double();
    double acc = 0.0;
    for (const auto& a : s1)
        for (const auto& b : s2) acc += sds(a, b);
    CHECK(msds(s1, s2) == doctest::Approx(acc / 16.0).epsilon(1e-15));
}

TEST_CASE("msds propagates pair-qualified errors") {
    std::vector<std::vector<double>> s1 = {{1, 1}, {0, 0}};
    std::vector<std::vector<double>> s2 = {{1, 2}};
    try {
        msds(s1, s2);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("(1, 0)") != std::string::npos);
    }
}

TEST_CASE("train config validation and schedules") {
    TrainConfig cfg;
    CHECK(cfg.steps() == 700);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.schedule(3, 100) == std::vector<std::uint64_t>{100, 100, 100});
    cfg.stage_iterations = {10, 20};
    CHECK(cfg.schedule(2, 0) == std::vector<std::uint64_t>{10, 20});
    CHECK_THROWS_AS(cfg.schedule(3, 0), ConfigError);

    TrainConfig bad;
    bad.dt = 2.0; // exceeds tau_I
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainConfig{};
    bad.label_fraction = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

namespace {

NetworkSpec tiny_spec() {
    NetworkSpec spec;
    ModuleSpec m;
    PathwaySpec p;
    p.kind = PathwayKind::FC;
    p.F = 12;
    m.pathways = {p};
    m.w_inh = 200.0;
    spec.modules.push_back(m);
    spec.encoder.lambda = 2.0;
    spec.encoder.lambda_step = 1.0;
    spec.encoder.lambda_max = 8.0;
    return spec;
}

TrainConfig tiny_cfg() {
    TrainConfig cfg;
    cfg.t_present = 50.0; // 100 steps keeps the test fast
    cfg.seed = 17;
    cfg.lif.theta_plus = 0.2;
    cfg.plast.c_norm = -0.3;
    cfg.checkpoint_every = 5;
    return cfg;
}

std::vector<double> all_weights(const Network& net) {
    std::vector<double> w;
    for (const auto& st : net.stages)
        for (const auto& bp : st.pathways)
            w.insert(w.end(), bp.ff.weights().begin(), bp.ff.weights().end());
    return w;
}

} // namespace

TEST_CASE("training is bit-deterministic under a fixed seed") {
    const Dataset data = synth_digits(20, 3);
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();

    Network a = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pa(a, cfg);
    train(pa, data, {15});

    Network b = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pb(b, cfg);
    train(pb, data, {15});

    CHECK(all_weights(a) == all_weights(b));
    CHECK(a.stages[0].pathways[0].pop.theta_values() ==
          b.stages[0].pathways[0].pop.theta_values());
}

TEST_CASE("resuming mid-stage reproduces the straight run bit-exactly") {
    const Dataset data = synth_digits(20, 3);
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();

    Network full = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pf(full, cfg);
    train(pf, data, {15});

    // stop after 7 presentations, then continue from the cursor
    Network half = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline ph(half, cfg);
    train(ph, data, {7});
    train(ph, data, {15}, TrainCursor{0, 7, false});

    CHECK(all_weights(full) == all_weights(half));
    CHECK(full.stages[0].pathways[0].pop.theta_values() ==
          half.stages[0].pathways[0].pop.theta_values());
}

TEST_CASE("frozen evaluation does not mutate the network") {
    const Dataset data = synth_digits(20, 3);
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();
    Network net = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pipe(net, cfg);
    train(pipe, data, {10});

    const auto w0 = all_weights(net);
    const auto th0 = net.stages[0].pathways[0].pop.theta_values();
    const double lambda0 = pipe.encoder().lambda;
    const LabelingResult labels = label_pass(pipe, data);
    evaluate(pipe, data, labels, Decoder::Vote);
    CHECK(all_weights(net) == w0);
    CHECK(net.stages[0].pathways[0].pop.theta_values() == th0);
    CHECK(pipe.encoder().lambda == lambda0);
}

TEST_CASE("label pass covers every class and fits the bigram model") {
    const Dataset data = synth_digits(40, 3);
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();
    Network net = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pipe(net, cfg);
    train(pipe, data, {20});
    const LabelingResult labels = label_pass(pipe, data);
    CHECK(labels.images_used == 40); // target exceeds the tiny dataset
    CHECK(labels.la.size() == 12);
    CHECK_FALSE(labels.bigram.counts.empty());
}

TEST_CASE("evaluate fills a consistent confusion matrix") {
    const Dataset data = synth_digits(30, 3);
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();
    Network net = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pipe(net, cfg);
    train(pipe, data, {15});
    const LabelingResult labels = label_pass(pipe, data);
    const Dataset test = synth_digits(20, 4, "test");
    const EvalResult ev = evaluate(pipe, test, labels, Decoder::Vote);
    std::uint64_t total = 0, diag = 0;
    for (std::uint32_t a = 0; a < kClassCount; ++a)
        for (std::uint32_t b = 0; b < kClassCount; ++b) {
            total += ev.confusion[a][b];
            if (a == b) diag += ev.confusion[a][b];
        }
    CHECK(total == 20);
    CHECK(ev.accuracy == doctest::Approx(double(diag) / 20.0));
}

TEST_CASE("decoder names") {
    CHECK(decoder_from_name("vote") == Decoder::Vote);
    CHECK(decoder_from_name("vfa") == Decoder::Vfa);
    CHECK(decoder_from_name("bigram") == Decoder::Bigram);
    CHECK_THROWS_AS(decoder_from_name("mlp"), ConfigError);
}

TEST_CASE("adaptive retry loop raises lambda during learning only") {
    // near-black images force retries at stage 1
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();
    Network net = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pipe(net, cfg);

    std::vector<std::uint8_t> dim(784, 0);
    dim[300] = 3;
    const double lambda0 = pipe.encoder().lambda;
    auto r = pipe.present_stage(0, dim.data(), nullptr, 1, true);
    CHECK(r.retries > 0);
    CHECK(pipe.encoder().lambda > lambda0); // bumps persist in learning mode

    const double lambda1 = pipe.encoder().lambda;
    auto f = pipe.present_stage(0, dim.data(), nullptr, 2, false);
    CHECK(pipe.encoder().lambda == lambda1); // frozen bumps are transient

    // an all-black image can never satisfy S_min: flagged at the cap
    std::vector<std::uint8_t> black(784, 0);
    auto fb = pipe.present_stage(0, black.data(), nullptr, 3, true);
    CHECK(fb.flagged);
    CHECK(fb.pres.output.total() == 0);
}

TEST_CASE("spiking map totals equal the recorded input intensity") {
    const Dataset data = synth_digits(10, 3);
    const NetworkSpec spec = tiny_spec();
    const TrainConfig cfg = tiny_cfg();
    Network net = build_network(spec, cfg.lif, cfg.plast, cfg.seed);
    Pipeline pipe(net, cfg);
    auto fr = pipe.forward(data.image(0), 5, true);
    std::uint64_t total = 0;
    for (std::uint32_t v : fr.input_maps[0]) total += v;
    CHECK(total == fr.stage_input[0]);
}
