#include "spikecept/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <set>

#include <json.hpp>

namespace spikecept {

using nlohmann::json;

// ---- IDX ----

namespace {

std::uint32_t be32(const std::vector<std::uint8_t>& buf, std::size_t off,
                   const std::string& origin) {
    if (off + 4 > buf.size())
        throw ConfigError(origin + ": truncated at byte offset " +
                          std::to_string(off));
    return (std::uint32_t(buf[off]) << 24) | (std::uint32_t(buf[off + 1]) << 16) |
           (std::uint32_t(buf[off + 2]) << 8) | std::uint32_t(buf[off + 3]);
}

void put_be32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v >> 24));
    buf.push_back(static_cast<std::uint8_t>(v >> 16));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
    buf.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& buf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw ConfigError("write failed: " + path);
}

} // namespace

std::vector<std::uint8_t> parse_idx_images(const std::vector<std::uint8_t>& buf,
                                           const std::string& origin) {
    if (be32(buf, 0, origin) != 2051)
        throw ConfigError(origin + ": bad image magic at byte offset 0 "
                          "(expected 2051)");
    const std::uint32_t n = be32(buf, 4, origin);
    const std::uint32_t rows = be32(buf, 8, origin);
    const std::uint32_t cols = be32(buf, 12, origin);
    if (rows != 28 || cols != 28)
        throw ConfigError(origin + ": dimensions at byte offset 8 are " +
                          std::to_string(rows) + "x" + std::to_string(cols) +
                          ", expected 28x28");
    const std::size_t expect = 16 + std::size_t(n) * 784;
    if (buf.size() != expect)
        throw ConfigError(origin + ": size " + std::to_string(buf.size()) +
                          " != expected " + std::to_string(expect) +
                          " (truncated after byte offset " +
                          std::to_string(buf.size()) + ")");
    return {buf.begin() + 16, buf.end()};
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& buf,
                                           const std::string& origin) {
    if (be32(buf, 0, origin) != 2049)
        throw ConfigError(origin + ": bad label magic at byte offset 0 "
                          "(expected 2049)");
    const std::uint32_t n = be32(buf, 4, origin);
    if (buf.size() != 8 + std::size_t(n))
        throw ConfigError(origin + ": size mismatch for " + std::to_string(n) +
                          " labels");
    return {buf.begin() + 8, buf.end()};
}

std::vector<std::uint8_t> serialize_idx_images(
    const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> buf;
    put_be32(buf, 2051);
    put_be32(buf, static_cast<std::uint32_t>(pixels.size() / 784));
    put_be32(buf, 28);
    put_be32(buf, 28);
    buf.insert(buf.end(), pixels.begin(), pixels.end());
    return buf;
}

std::vector<std::uint8_t> serialize_idx_labels(
    const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> buf;
    put_be32(buf, 2049);
    put_be32(buf, static_cast<std::uint32_t>(labels.size()));
    buf.insert(buf.end(), labels.begin(), labels.end());
    return buf;
}

Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path) {
    Dataset d;
    d.images = parse_idx_images(read_file(images_path), images_path);
    d.labels = parse_idx_labels(read_file(labels_path), labels_path);
    if (d.images.size() != d.labels.size() * 784)
        throw ConfigError("IDX pair mismatch: " +
                          std::to_string(d.images.size() / 784) + " images vs " +
                          std::to_string(d.labels.size()) + " labels");
    d.validate();
    return d;
}

void save_mnist_idx(const Dataset& data, const std::string& images_path,
                    const std::string& labels_path) {
    write_file(images_path, serialize_idx_images(data.images));
    write_file(labels_path, serialize_idx_labels(data.labels));
}

// ---- JSON config ----

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + path + "." + it.key() +
                              "'");
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return obj.at(key).get<T>();
}

PathwaySpec parse_pathway(const json& j, const std::string& path) {
    check_keys(j, {"kind", "k", "s", "F", "repeat"}, path);
    PathwaySpec p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "FC") {
        p.kind = PathwayKind::FC;
        p.k = kInputSide;
    } else if (kind == "LC") {
        p.kind = PathwayKind::LC;
        p.k = j.at("k").get<std::uint32_t>();
        p.s = j.at("s").get<std::uint32_t>();
    } else {
        throw ConfigError("config: " + path + ".kind must be FC or LC");
    }
    p.F = j.at("F").get<std::uint32_t>();
    return p;
}

json pathway_to_json(const PathwaySpec& p) {
    json j;
    if (p.kind == PathwayKind::FC) {
        j["kind"] = "FC";
    } else {
        j["kind"] = "LC";
        j["k"] = p.k;
        j["s"] = p.s;
    }
    j["F"] = p.F;
    return j;
}

} // namespace

FullConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    try {
        check_keys(root, {"network", "train"}, "$");
        FullConfig fc;
        const json& net = root.at("network");
        check_keys(net, {"modules", "pra", "encoder", "s_min"}, "$.network");
        std::size_t mi = 0;
        for (const json& jm : net.at("modules")) {
            const std::string mpath = "$.network.modules[" + std::to_string(mi++) + "]";
            check_keys(jm, {"pathways", "balanced", "w_inh"}, mpath);
            ModuleSpec m;
            m.balanced = get_or(jm, "balanced", true);
            m.w_inh = get_or(jm, "w_inh", 17.5);
            std::size_t pi = 0;
            for (const json& jp : jm.at("pathways")) {
                const std::string ppath = mpath + ".pathways[" + std::to_string(pi++) + "]";
                PathwaySpec p = parse_pathway(jp, ppath);
                const std::uint32_t repeat = get_or<std::uint32_t>(jp, "repeat", 1);
                if (repeat == 0)
                    throw ConfigError("config: " + ppath + ".repeat must be >= 1");
                for (std::uint32_t r = 0; r < repeat; ++r)
                    m.pathways.push_back(p);
            }
            fc.network.modules.push_back(std::move(m));
        }
        if (net.contains("pra")) {
            std::size_t qi = 0;
            for (const json& jq : net.at("pra")) {
                const std::string qpath = "$.network.pra[" + std::to_string(qi++) + "]";
                check_keys(jq, {"channels", "w_p_init", "w_p_step", "w_p_max",
                                "tau_I"},
                           qpath);
                PRASpec q;
                q.channels = get_or<std::uint32_t>(jq, "channels", 2);
                q.w_p_init = get_or(jq, "w_p_init", 1.0);
                q.w_p_step = get_or(jq, "w_p_step", 0.1);
                q.w_p_max = get_or(jq, "w_p_max", 20.0);
                q.tau_I = get_or(jq, "tau_I", 100.0);
                fc.network.pras.push_back(q);
            }
        }
        if (net.contains("encoder")) {
            const json& je = net.at("encoder");
            check_keys(je, {"lambda", "lambda_step", "lambda_max"}, "$.network.encoder");
            fc.network.encoder.lambda = get_or(je, "lambda", 0.25);
            fc.network.encoder.lambda_step = get_or(je, "lambda_step", 0.125);
            fc.network.encoder.lambda_max = get_or(je, "lambda_max", 1.0);
        }
        fc.network.s_min = get_or<std::uint32_t>(net, "s_min", 5);

        if (root.contains("train")) {
            const json& tr = root.at("train");
            check_keys(tr,
                       {"stage_iterations", "checkpoint_every", "seed", "dt",
                        "t_present", "lif", "plasticity", "label_fraction",
                        "label_min_per_class"},
                       "$.train");
            TrainConfig& t = fc.train;
            if (tr.contains("stage_iterations"))
                t.stage_iterations =
                    tr.at("stage_iterations").get<std::vector<std::uint64_t>>();
            t.checkpoint_every = get_or<std::uint32_t>(tr, "checkpoint_every", 500);
            t.seed = get_or<std::uint64_t>(tr, "seed", 1);
            t.dt = get_or(tr, "dt", 0.5);
            t.t_present = get_or(tr, "t_present", 350.0);
            t.label_fraction = get_or(tr, "label_fraction", 0.1);
            t.label_min_per_class =
                get_or<std::uint32_t>(tr, "label_min_per_class", 100);
            if (tr.contains("lif")) {
                const json& jl = tr.at("lif");
                check_keys(jl,
                           {"v_rest", "v_reset", "v_thres", "tau_v", "tau_I", "R",
                            "t_ref", "theta_plus", "tau_theta"},
                           "$.train.lif");
                LIFParams& l = t.lif;
                l.v_rest = get_or(jl, "v_rest", l.v_rest);
                l.v_reset = get_or(jl, "v_reset", l.v_reset);
                l.v_thres = get_or(jl, "v_thres", l.v_thres);
                l.tau_v = get_or(jl, "tau_v", l.tau_v);
                l.tau_I = get_or(jl, "tau_I", l.tau_I);
                l.R = get_or(jl, "R", l.R);
                l.t_ref = get_or(jl, "t_ref", l.t_ref);
                l.theta_plus = get_or(jl, "theta_plus", l.theta_plus);
                l.tau_theta = get_or(jl, "tau_theta", l.tau_theta);
            }
            if (tr.contains("plasticity")) {
                const json& jp = tr.at("plasticity");
                check_keys(jp,
                           {"eta_post", "eta_pre", "tau_pre", "tau_post", "w_min",
                            "w_max", "c_norm", "c_norm_stacked", "w_max_stacked"},
                           "$.train.plasticity");
                PlasticityParams& p = t.plast;
                p.eta_post = get_or(jp, "eta_post", p.eta_post);
                p.eta_pre = get_or(jp, "eta_pre", p.eta_pre);
                p.tau_pre = get_or(jp, "tau_pre", p.tau_pre);
                p.tau_post = get_or(jp, "tau_post", p.tau_post);
                p.w_min = get_or(jp, "w_min", p.w_min);
                p.w_max = get_or(jp, "w_max", p.w_max);
                p.c_norm = get_or(jp, "c_norm", p.c_norm);
                p.c_norm_stacked = get_or(jp, "c_norm_stacked", p.c_norm_stacked);
                p.w_max_stacked = get_or(jp, "w_max_stacked", p.w_max_stacked);
            }
        }
        fc.network.validate();
        fc.train.validate();
        return fc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::string serialize_config(const FullConfig& fc) {
    json root;
    json& net = root["network"];
    for (const auto& m : fc.network.modules) {
        json jm;
        jm["balanced"] = m.balanced;
        jm["w_inh"] = m.w_inh;
        for (const auto& p : m.pathways) jm["pathways"].push_back(pathway_to_json(p));
        net["modules"].push_back(jm);
    }
    for (const auto& q : fc.network.pras) {
        net["pra"].push_back({{"channels", q.channels},
                              {"w_p_init", q.w_p_init},
                              {"w_p_step", q.w_p_step},
                              {"w_p_max", q.w_p_max},
                              {"tau_I", q.tau_I}});
    }
    net["encoder"] = {{"lambda", fc.network.encoder.lambda},
                      {"lambda_step", fc.network.encoder.lambda_step},
                      {"lambda_max", fc.network.encoder.lambda_max}};
    net["s_min"] = fc.network.s_min;

    json& tr = root["train"];
    if (!fc.train.stage_iterations.empty())
        tr["stage_iterations"] = fc.train.stage_iterations;
    tr["checkpoint_every"] = fc.train.checkpoint_every;
    tr["seed"] = fc.train.seed;
    tr["dt"] = fc.train.dt;
    tr["t_present"] = fc.train.t_present;
    tr["label_fraction"] = fc.train.label_fraction;
    tr["label_min_per_class"] = fc.train.label_min_per_class;
    const LIFParams& l = fc.train.lif;
    tr["lif"] = {{"v_rest", l.v_rest},   {"v_reset", l.v_reset},
                 {"v_thres", l.v_thres}, {"tau_v", l.tau_v},
                 {"tau_I", l.tau_I},     {"R", l.R},
                 {"t_ref", l.t_ref},     {"theta_plus", l.theta_plus},
                 {"tau_theta", l.tau_theta}};
    const PlasticityParams& p = fc.train.plast;
    tr["plasticity"] = {{"eta_post", p.eta_post}, {"eta_pre", p.eta_pre},
                        {"tau_pre", p.tau_pre},   {"tau_post", p.tau_post},
                        {"w_min", p.w_min},       {"w_max", p.w_max},
                        {"c_norm", p.c_norm},
                        {"c_norm_stacked", p.c_norm_stacked},
                        {"w_max_stacked", p.w_max_stacked}};
    return root.dump(2);
}

// ---- checkpoints ----

namespace {

struct Writer {
    std::vector<std::uint8_t> buf;
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf.insert(buf.end(), b, b + n);
    }
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void f64(double v) { raw(&v, 8); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void vec_f64(const std::vector<double>& v) {
        u64(v.size());
        raw(v.data(), v.size() * 8);
    }
};

struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;
    void raw(void* p, std::size_t n) {
        if (pos + n > buf.size())
            throw ConfigError("checkpoint: truncated at byte " +
                              std::to_string(pos));
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
    std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
    double f64() { double v; raw(&v, 8); return v; }
    std::string str() {
        std::string s(u64(), '\0');
        raw(s.data(), s.size());
        return s;
    }
    std::vector<double> vec_f64() {
        std::vector<double> v(u64());
        raw(v.data(), v.size() * 8);
        return v;
    }
};

} // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i)
        c = table[(c ^ data[i]) & 0xff] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
    Writer w;
    w.raw("SPKC", 4);
    w.u32(kCheckpointVersion);
    w.str(serialize_config(cp.config));
    w.u32(cp.cursor.stage);
    w.u64(cp.cursor.iteration);
    w.u8(cp.cursor.finished ? 1 : 0);
    w.f64(cp.lambda);
    w.vec_f64(cp.w_p);
    w.u64(cp.thetas.size());
    for (const auto& t : cp.thetas) w.vec_f64(t);
    w.u64(cp.weights.size());
    for (const auto& ws : cp.weights) w.vec_f64(ws);
    w.u8(cp.labels ? 1 : 0);
    if (cp.labels) {
        const auto& la = cp.labels->la;
        w.u64(la.size());
        for (const auto& row : la.response_matrix)
            for (double v : row) w.f64(v);
        for (std::uint32_t l : la.neuron_label) w.u32(l);
        w.u64(la.silent_neurons);
        w.u64(cp.labels->bigram.counts.size());
        for (const auto& [pair, counts] : cp.labels->bigram.counts) {
            w.u32(pair.first);
            w.u32(pair.second);
            for (std::uint32_t c : counts) w.u32(c);
        }
        w.u64(cp.labels->images_used);
    }
    w.u32(crc32(w.buf.data(), w.buf.size()));
    write_file(path, w.buf);
}

Checkpoint load_checkpoint(const std::string& path) {
    const auto buf = read_file(path);
    if (buf.size() < 12 || std::memcmp(buf.data(), "SPKC", 4) != 0)
        throw ConfigError("checkpoint: not a spikecept checkpoint: " + path);
    const std::uint32_t stored_crc =
        static_cast<std::uint32_t>(buf[buf.size() - 4]) << 0 |
        static_cast<std::uint32_t>(buf[buf.size() - 3]) << 8 |
        static_cast<std::uint32_t>(buf[buf.size() - 2]) << 16 |
        static_cast<std::uint32_t>(buf[buf.size() - 1]) << 24;
    if (crc32(buf.data(), buf.size() - 4) != stored_crc)
        throw ConfigError("checkpoint: checksum mismatch (corrupt or truncated): " +
                          path);
    Reader r{buf};
    r.pos = 4;
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw ConfigError("checkpoint: format version " + std::to_string(version) +
                          " != supported " + std::to_string(kCheckpointVersion));
    Checkpoint cp;
    cp.config = parse_config(r.str());
    cp.cursor.stage = r.u32();
    cp.cursor.iteration = r.u64();
    cp.cursor.finished = r.u8() != 0;
    cp.lambda = r.f64();
    cp.w_p = r.vec_f64();
    cp.thetas.resize(r.u64());
    for (auto& t : cp.thetas) t = r.vec_f64();
    cp.weights.resize(r.u64());
    for (auto& ws : cp.weights) ws = r.vec_f64();
    if (r.u8()) {
        LabelingResult lr;
        const std::uint64_t n = r.u64();
        lr.la.response_matrix.resize(n);
        for (auto& row : lr.la.response_matrix)
            for (double& v : row) v = r.f64();
        lr.la.neuron_label.resize(n);
        for (auto& l : lr.la.neuron_label) l = r.u32();
        lr.la.silent_neurons = r.u64();
        const std::uint64_t pairs = r.u64();
        for (std::uint64_t k = 0; k < pairs; ++k) {
            std::uint32_t a = r.u32(), b = r.u32();
            std::array<std::uint32_t, kClassCount> counts{};
            for (auto& c : counts) c = r.u32();
            lr.bigram.counts[{a, b}] = counts;
        }
        lr.images_used = r.u64();
        cp.labels = std::move(lr);
    }
    return cp;
}

Checkpoint make_checkpoint(const Network& net, const TrainConfig& cfg,
                           const TrainCursor& cursor, double lambda,
                           const std::optional<LabelingResult>& labels) {
    Checkpoint cp;
    cp.config.network = net.spec;
    cp.config.train = cfg;
    cp.cursor = cursor;
    cp.lambda = lambda;
    for (const auto& st : net.stages) {
        if (st.pra) cp.w_p.push_back(st.pra->w_p);
        for (const auto& bp : st.pathways) {
            cp.thetas.push_back(bp.pop.theta_values());
            cp.weights.push_back(bp.ff.weights());
        }
    }
    cp.labels = labels;
    return cp;
}

Network restore_network(const Checkpoint& cp) {
    Network net = build_network(cp.config.network, cp.config.train.lif,
                                cp.config.train.plast, cp.config.train.seed);
    std::size_t pw = 0, pb = 0;
    for (auto& st : net.stages) {
        if (st.pra) st.pra->w_p = cp.w_p.at(pw++);
        for (auto& bp : st.pathways) {
            auto& theta = cp.thetas.at(pb);
            auto& weights = cp.weights.at(pb);
            pb++;
            if (theta.size() != bp.pop.size() ||
                weights.size() != bp.ff.connection_count())
                throw ConfigError("checkpoint: state does not match topology");
            bp.pop.theta_values() = theta;
            bp.ff.weights() = weights;
        }
    }
    return net;
}

// ---- CSV ----

void emit_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV: " + path);
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw ConfigError("CSV write failed: " + path);
}

} // namespace spikecept
