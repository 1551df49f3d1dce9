#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "spikecept/harness.hpp"
#include "spikecept/io.hpp"
#include "spikecept/presets.hpp"
#include "spikecept/synth.hpp"

namespace sc = spikecept;

namespace {

struct CommonOpts {
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::size_t train_count = 3000;
    std::size_t test_count = 1000;
    std::string data_dir;
    std::string csv;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "deterministic seed (env SPIKECEPT_SEED)")
        ->each([&o](const std::string&) { o.seed_given = true; });
    cmd->add_option("--train-count", o.train_count,
                    "training presentations per stage");
    cmd->add_option("--test-count", o.test_count, "test images for evaluation");
    cmd->add_option("--data-dir", o.data_dir,
                    "directory with MNIST IDX files (default: synthetic digits)");
    cmd->add_option("--csv", o.csv, "also write results to this CSV file");
}

std::uint64_t resolve_seed(const CommonOpts& o) {
    if (o.seed_given) return o.seed;
    if (const char* env = std::getenv("SPIKECEPT_SEED"))
        return std::stoull(env);
    return o.seed;
}

sc::Dataset load_split(const CommonOpts& o, const std::string& split,
                       std::size_t count, std::uint64_t seed) {
    std::string dir = o.data_dir;
    if (dir.empty())
        if (const char* env = std::getenv("SPIKECEPT_DATA")) dir = env;
    if (!dir.empty()) {
        const bool train = split == "train";
        const std::string stem = train ? "train" : "t10k";
        sc::Dataset d = sc::load_mnist_idx(
            dir + "/" + stem + "-images-idx3-ubyte",
            dir + "/" + stem + "-labels-idx1-ubyte");
        d.split = split;
        return d.head(count);
    }
    return sc::synth_digits(count, seed, split);
}

void print_confusion(const sc::EvalResult& ev) {
    std::cout << "confusion (rows = true class):\n";
    for (std::uint32_t a = 0; a < sc::kClassCount; ++a) {
        for (std::uint32_t b = 0; b < sc::kClassCount; ++b)
            std::cout << (b ? " " : "  ") << ev.confusion[a][b];
        std::cout << "\n";
    }
}

struct TrainedBundle {
    sc::FullConfig config;
    sc::Network net;
    sc::LabelingResult labels;
    double lambda = 0.0;
};

TrainedBundle load_trained(const std::string& ckpt_path) {
    sc::Checkpoint cp = sc::load_checkpoint(ckpt_path);
    if (!cp.labels)
        throw sc::ConfigError("checkpoint has no labeling pass; finish training "
                              "first: " + ckpt_path);
    TrainedBundle b{cp.config, sc::restore_network(cp), *cp.labels, cp.lambda};
    return b;
}

sc::Pipeline make_pipeline(TrainedBundle& b) {
    sc::Pipeline pipe(b.net, b.config.train);
    pipe.encoder().lambda = b.lambda;
    return pipe;
}

int run_counts(const std::string& config, const CommonOpts& o) {
    std::vector<std::string> names;
    if (config == "all") {
        for (const auto& n : sc::preset_names())
            if (n.rfind("desk-", 0) != 0 && n != "table-ii-stack")
                names.push_back(n);
    } else {
        names.push_back(config);
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& name : names) {
        const sc::FullConfig fc = sc::load_config(name);
        if (fc.network.stage_count() > 1) {
            const auto per_stage = sc::count_resources_per_stage(fc.network);
            for (std::size_t s = 0; s < per_stage.size(); ++s) {
                std::cout << name << " through stage " << s + 1 << ": n_neuron="
                          << per_stage[s].n_neuron
                          << " n_synapse=" << per_stage[s].n_synapse << "\n";
                rows.push_back({name + ":stage" + std::to_string(s + 1),
                                std::to_string(per_stage[s].n_neuron),
                                std::to_string(per_stage[s].n_synapse)});
            }
        } else {
            const sc::NetworkStats st = sc::count_resources(fc.network);
            std::cout << name << ": n_neuron=" << st.n_neuron
                      << " n_synapse=" << st.n_synapse << "\n";
            rows.push_back({name, std::to_string(st.n_neuron),
                            std::to_string(st.n_synapse)});
        }
    }
    if (!o.csv.empty())
        sc::emit_csv(o.csv, "config,n_neuron,n_synapse", rows);
    return 0;
}

int run_train(const std::string& config, const std::string& out,
              const std::string& resume, CommonOpts& o) {
    sc::FullConfig fc;
    sc::TrainCursor start{};
    std::optional<sc::Checkpoint> resumed;
    if (!resume.empty()) {
        resumed = sc::load_checkpoint(resume);
        fc = resumed->config;
        start = resumed->cursor;
    } else {
        fc = sc::load_config(config);
        fc.train.seed = resolve_seed(o);
    }
    const sc::Dataset data = load_split(o, "train", o.train_count, fc.train.seed);
    const auto schedule =
        fc.train.schedule(fc.network.stage_count(), o.train_count);

    sc::Network net = resumed ? sc::restore_network(*resumed)
                              : sc::build_network(fc.network, fc.train.lif,
                                                  fc.train.plast, fc.train.seed);
    sc::Pipeline pipe(net, fc.train);
    if (resumed) pipe.encoder().lambda = resumed->lambda;

    const auto hook = [&](const sc::TrainCursor& cur) {
        sc::save_checkpoint(out, sc::make_checkpoint(net, fc.train, cur,
                                                     pipe.encoder().lambda,
                                                     std::nullopt));
    };
    const sc::TrainResult tr = sc::train(pipe, data, schedule, start, hook);
    std::cout << "trained " << fc.network.stage_count() << " stage(s), "
              << tr.total_retries << " adaptive retries, "
              << tr.flagged_presentations << " flagged, " << tr.wraps
              << " dataset wraps\n";

    const sc::LabelingResult labels = sc::label_pass(pipe, data);
    std::cout << "labeling pass over " << labels.images_used << " images, "
              << labels.la.silent_neurons << " silent neurons\n";
    sc::save_checkpoint(out, sc::make_checkpoint(net, fc.train, tr.cursor,
                                                 pipe.encoder().lambda, labels));
    std::cout << "checkpoint written: " << out << "\n";
    return 0;
}

int run_eval(const std::string& ckpt, const std::string& decoder,
             CommonOpts& o) {
    TrainedBundle b = load_trained(ckpt);
    const sc::Dataset test =
        load_split(o, "test", o.test_count, b.config.train.seed);
    sc::Pipeline pipe = make_pipeline(b);
    const sc::EvalResult ev =
        sc::evaluate(pipe, test, b.labels, sc::decoder_from_name(decoder));
    std::cout << "accuracy=" << ev.accuracy * 100.0 << "% over " << test.count()
              << " images (" << ev.no_spike << " silent presentations)\n";
    print_confusion(ev);
    if (!o.csv.empty())
        sc::emit_csv(o.csv, "decoder,accuracy",
                     {{decoder, std::to_string(ev.accuracy)}});
    return 0;
}

int run_ablate(const std::string& ckpt, const std::string& mode,
               std::vector<double> rhos, std::uint32_t trials,
               const std::string& decoder, CommonOpts& o) {
    TrainedBundle b = load_trained(ckpt);
    const sc::Dataset test =
        load_split(o, "test", o.test_count, b.config.train.seed);
    if (rhos.empty()) rhos = {0.0, 0.25, 0.5, 0.75, 1.0};
    const sc::AblateMode am = mode == "synapses" ? sc::AblateMode::Synapses
                                                 : sc::AblateMode::Neurons;
    const auto sweep =
        sc::robustness_sweep(b.net, b.config.train, test, b.labels,
                             sc::decoder_from_name(decoder), rhos, am, trials,
                             resolve_seed(o), b.lambda);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : sweep) {
        std::cout << "rho=" << r.rho << " mean_acc=" << r.mean_accuracy * 100.0
                  << "% std=" << r.stddev * 100.0 << "\n";
        rows.push_back({std::to_string(r.rho), mode,
                        std::to_string(r.mean_accuracy),
                        std::to_string(r.stddev)});
    }
    if (!o.csv.empty())
        sc::emit_csv(o.csv, "rho,mode,mean_acc,std", rows);
    return 0;
}

int run_intensity(const std::string& ckpt, std::size_t images, CommonOpts& o) {
    TrainedBundle b = load_trained(ckpt);
    const sc::Dataset test =
        load_split(o, "test", o.test_count, b.config.train.seed);
    sc::Pipeline pipe = make_pipeline(b);
    const sc::IntensityReport rep = sc::measure_intensity(pipe, test, images);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows) {
        std::cout << "stage " << r.stage + 1 << ": input=" << r.input_spikes
                  << " output=" << r.output_spikes << " spikes/presentation\n";
        rows.push_back({std::to_string(r.stage + 1),
                        std::to_string(r.input_spikes),
                        std::to_string(r.output_spikes)});
    }
    std::cout << rep.flagged << " flagged presentations; min final output "
              << rep.min_final_output << " spikes (non-flagged)\n";
    if (!o.csv.empty())
        sc::emit_csv(o.csv, "stage,input_spikes,output_spikes", rows);
    return 0;
}

int run_msds(const std::string& ckpt, std::uint32_t stage,
             std::size_t per_class, CommonOpts& o) {
    TrainedBundle b = load_trained(ckpt);
    const sc::Dataset test =
        load_split(o, "test", o.test_count, b.config.train.seed);
    sc::Pipeline pipe = make_pipeline(b);
    const sc::MsdsReport rep = sc::msds_report(pipe, stage - 1, test, per_class);
    std::cout << "MSDS matrix of mean input spiking maps, stage " << stage
              << ":\n";
    std::vector<std::vector<std::string>> rows;
    for (std::uint32_t a = 0; a < sc::kClassCount; ++a) {
        for (std::uint32_t b2 = 0; b2 < sc::kClassCount; ++b2) {
            std::cout << (b2 ? " " : "  ") << rep.matrix[a][b2];
            rows.push_back({std::to_string(a), std::to_string(b2),
                            std::to_string(rep.matrix[a][b2])});
        }
        std::cout << "\n";
    }
    std::cout << "off-diagonal mean: " << rep.off_diagonal_mean << "\n";
    if (!o.csv.empty())
        sc::emit_csv(o.csv, "class_a,class_b,value", rows);
    return 0;
}

int run_curve(const std::string& config, const std::string& out,
              std::vector<std::uint64_t> points, const std::string& decoder,
              CommonOpts& o) {
    sc::FullConfig fc = sc::load_config(config);
    fc.train.seed = resolve_seed(o);
    const sc::Dataset data = load_split(o, "train", o.train_count, fc.train.seed);
    const sc::Dataset test = load_split(o, "test", o.test_count, fc.train.seed);
    if (points.empty())
        points = {o.train_count / 6, o.train_count / 2, o.train_count};

    std::vector<std::vector<std::string>> rows;
    for (std::uint64_t iters : points) {
        sc::Network net = sc::build_network(fc.network, fc.train.lif,
                                            fc.train.plast, fc.train.seed);
        sc::Pipeline pipe(net, fc.train);
        const auto schedule = fc.train.schedule(fc.network.stage_count(), iters);
        sc::train(pipe, data, schedule);
        const sc::LabelingResult labels = sc::label_pass(pipe, data);
        const sc::EvalResult ev =
            sc::evaluate(pipe, test, labels, sc::decoder_from_name(decoder));
        std::cout << "iterations=" << iters
                  << " accuracy=" << ev.accuracy * 100.0 << "%\n";
        rows.push_back({std::to_string(iters), std::to_string(ev.accuracy)});
    }
    const std::string csv = !o.csv.empty() ? o.csv : out;
    if (!csv.empty()) sc::emit_csv(csv, "iteration,accuracy", rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spikecept: STDP competitive-learning SNN engine"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string config, out, resume, ckpt;
    std::string decoder = "vote", mode = "neurons";
    std::vector<double> rhos;
    std::vector<std::uint64_t> curve_points;
    std::uint32_t trials = 3, stage = 1;
    std::size_t images = 100, per_class = 10, synth_count = 1000;
    std::string synth_prefix = "synth";

    auto* c_counts = app.add_subcommand("counts", "resource accounting");
    c_counts->add_option("config", config, "preset name, JSON file, or 'all'")
        ->required();
    add_common(c_counts, o);

    auto* c_train = app.add_subcommand("train", "train a network");
    c_train->add_option("config", config)->required();
    c_train->add_option("--out", out, "checkpoint path")->required();
    c_train->add_option("--resume", resume, "checkpoint to continue from");
    add_common(c_train, o);

    auto* c_eval = app.add_subcommand("eval", "evaluate a trained checkpoint");
    c_eval->add_option("ckpt", ckpt)->required();
    c_eval->add_option("--decoder", decoder, "vote|vfa|bigram");
    add_common(c_eval, o);

    auto* c_ablate = app.add_subcommand("ablate", "robustness sweep");
    c_ablate->add_option("ckpt", ckpt)->required();
    c_ablate->add_option("--mode", mode, "neurons|synapses");
    c_ablate->add_option("--rho", rhos, "deletion probabilities");
    c_ablate->add_option("--trials", trials);
    c_ablate->add_option("--decoder", decoder);
    add_common(c_ablate, o);

    auto* c_int = app.add_subcommand("intensity", "spiking intensity report");
    c_int->add_option("ckpt", ckpt)->required();
    c_int->add_option("--images", images);
    add_common(c_int, o);

    auto* c_msds = app.add_subcommand("msds", "input-map similarity matrix");
    c_msds->add_option("ckpt", ckpt)->required();
    c_msds->add_option("--stage", stage, "1-based stage index");
    c_msds->add_option("--per-class", per_class);
    add_common(c_msds, o);

    auto* c_curve = app.add_subcommand("curve", "learning curve");
    c_curve->add_option("config", config)->required();
    c_curve->add_option("--out", out, "CSV output path");
    c_curve->add_option("--points", curve_points, "iteration counts");
    c_curve->add_option("--decoder", decoder);
    add_common(c_curve, o);

    auto* c_synth = app.add_subcommand("synth", "write synthetic IDX files");
    c_synth->add_option("--count", synth_count);
    c_synth->add_option("--prefix", synth_prefix);
    add_common(c_synth, o);

    auto* c_presets = app.add_subcommand("presets", "list bundled presets");
    (void)c_presets;

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_counts->parsed()) return run_counts(config, o);
        if (c_train->parsed()) return run_train(config, out, resume, o);
        if (c_eval->parsed()) return run_eval(ckpt, decoder, o);
        if (c_ablate->parsed())
            return run_ablate(ckpt, mode, rhos, trials, decoder, o);
        if (c_int->parsed()) return run_intensity(ckpt, images, o);
        if (c_msds->parsed()) return run_msds(ckpt, stage, per_class, o);
        if (c_curve->parsed())
            return run_curve(config, out, curve_points, decoder, o);
        if (c_synth->parsed()) {
            const sc::Dataset d =
                sc::synth_digits(synth_count, resolve_seed(o), "train");
            sc::save_mnist_idx(d, synth_prefix + "-images-idx3-ubyte",
                               synth_prefix + "-labels-idx1-ubyte");
            std::cout << "wrote " << d.count() << " images to " << synth_prefix
                      << "-*\n";
            return 0;
        }
        if (c_presets->parsed()) {
            for (const auto& n : sc::preset_names()) std::cout << n << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
