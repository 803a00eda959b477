#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "exwalk/harness.hpp"
#include "exwalk/layers.hpp"
#include "exwalk/rng.hpp"
#include "exwalk/verify.hpp"

namespace exwalk::io {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj,
                                const std::vector<std::string>& known,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) ok = ok || it.key() == k;
        if (!ok)
            throw std::invalid_argument("unknown key \"" + it.key() + "\" in " + where);
    }
}

/// Speed spec strings: "powerlaw:ALPHA" or "powerlaw:ALPHA:eps=E".
inline SpeedFunction parse_speed(const std::string& spec) {
    if (spec.rfind("powerlaw:", 0) != 0)
        throw std::invalid_argument("unsupported speed spec \"" + spec +
                                    "\" (expected powerlaw:ALPHA)");
    std::string rest = spec.substr(9);
    double eps = 0.0;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
        std::string opt = rest.substr(colon + 1);
        rest = rest.substr(0, colon);
        if (opt.rfind("eps=", 0) != 0)
            throw std::invalid_argument("bad speed option \"" + opt + "\"");
        eps = std::stod(opt.substr(4));
    }
    return SpeedFunction::powerlaw(std::stod(rest), eps);
}

/// Speed table file: JSON {"points": [[x,f],...], "epsilon": e}.
inline SpeedFunction parse_speed_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open speed table " + path);
    json j = json::parse(in);
    reject_unknown_keys(j, {"points", "epsilon"}, path);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points"))
        pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return SpeedFunction::table(std::move(pts), j.value("epsilon", 0.0));
}

inline json layers_to_json(const LayerParams& layers) {
    json j;
    j["m0"] = layers.m0;
    json k = json::array(), l = json::array();
    for (std::size_t s = 0; s < layers.size(); ++s) {
        k.push_back(layers.k[s].str());
        l.push_back(layers.l[s].str());
    }
    j["k"] = k;
    j["l"] = l;
    j["loglog_index"] = layers.loglog_index;
    j["diffusive_tail"] = layers.diffusive_tail;
    return j;
}

inline ExtInt ext_from_json(const json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf") return ExtInt::infinity();
        return ExtInt::of(BigInt(s));
    }
    return ExtInt::of(BigInt(v.get<std::int64_t>()));
}

inline LayerParams layers_from_json(const json& j) {
    reject_unknown_keys(j, {"m0", "k", "l", "loglog_index", "diffusive_tail"},
                        "layers");
    LayerParams layers;
    layers.m0 = j.at("m0").get<double>();
    for (const auto& v : j.at("k")) layers.k.push_back(ext_from_json(v));
    for (const auto& v : j.at("l")) layers.l.push_back(ext_from_json(v));
    layers.loglog_index = j.value("loglog_index", -1);
    layers.diffusive_tail = j.value("diffusive_tail", false);
    layers.validate();
    layers.compute_loglog_index();
    return layers;
}

/// Experiment config JSON. Unknown keys are a hard error; defaults are
/// applied and echoed back by resolved_config.
struct ResolvedExperiment {
    ExperimentConfig cfg;
    std::string f_spec;
    double m0 = 2.0;
    double x_max = 0.0;  // layer horizon actually used
};

inline ResolvedExperiment parse_experiment_config(const json& j) {
    reject_unknown_keys(j,
                        {"seed", "trials", "n_max", "checkpoint_base", "f", "m0",
                         "x_max", "r", "sigma", "c0", "d2", "m_burnin", "threads"},
                        "experiment config");
    ResolvedExperiment rx;
    rx.cfg.seed = j.value("seed", std::uint64_t{1});
    rx.cfg.trials = j.value("trials", std::uint64_t{8});
    rx.cfg.n_max = j.at("n_max").get<std::uint64_t>();
    rx.cfg.checkpoint_base = j.value("checkpoint_base", 2.0);
    rx.cfg.r = j.value("r", 0.125);
    rx.cfg.dist.sigma = j.value("sigma", 1.0);
    rx.cfg.dist.c0 = j.value("c0", 1.0);
    rx.cfg.dist.d2 = j.value("d2", 0.25);
    rx.cfg.m_burnin = j.value("m_burnin", std::uint64_t{10});
    rx.cfg.threads = j.value("threads", std::uint64_t{0});
    rx.f_spec = j.at("f").get<std::string>();
    rx.m0 = j.value("m0", 2.0);
    double nm = static_cast<double>(rx.cfg.n_max);
    rx.x_max = j.value("x_max", nm * nm);
    rx.cfg.layers = build_layers(parse_speed(rx.f_spec), rx.m0, rx.x_max);
    rx.cfg.validate();
    return rx;
}

inline json resolved_config(const ResolvedExperiment& rx) {
    json j;
    j["seed"] = rx.cfg.seed;
    j["trials"] = rx.cfg.trials;
    j["n_max"] = rx.cfg.n_max;
    j["checkpoint_base"] = rx.cfg.checkpoint_base;
    j["f"] = rx.f_spec;
    j["m0"] = rx.m0;
    j["x_max"] = rx.x_max;
    j["r"] = rx.cfg.r;
    j["sigma"] = rx.cfg.dist.sigma;
    j["c0"] = rx.cfg.dist.c0;
    j["d2"] = rx.cfg.dist.d2;
    j["m_burnin"] = rx.cfg.m_burnin;
    j["threads"] = rx.cfg.threads;
    return j;
}

inline const char* kLilCsvHeader =
    "trial,m,n,range,s0,s0p,s1,s2,s3,s3t,D_up,D_lo,g,h,fs_limsup,fs_liminf,"
    "r_up_g,r_lo_h,tag";

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string lil_record_csv(const LilRecord& r) {
    std::ostringstream os;
    os << r.trial << ',' << r.m << ',' << r.n << ',' << r.range << ',' << r.s0
       << ',' << r.s0p << ',' << r.s1 << ',' << r.s2 << ',' << r.s3 << ','
       << r.s3t << ',' << format_double(r.d_up) << ',' << format_double(r.d_lo)
       << ',' << format_double(r.g) << ',' << format_double(r.h) << ','
       << format_double(r.fs_limsup) << ',' << format_double(r.fs_liminf) << ','
       << format_double(r.r_up_g) << ',' << format_double(r.r_lo_h) << ','
       << tag_name(r.tag);
    return os.str();
}

inline std::string lil_records_csv(const std::vector<LilRecord>& records) {
    std::ostringstream os;
    os << kLilCsvHeader << '\n';
    for (const auto& r : records) os << lil_record_csv(r) << '\n';
    return os.str();
}

inline json report_to_json(const VerifyReport& rep) {
    json j;
    j["name"] = rep.name;
    j["mode"] = rep.mode;
    j["instances"] = rep.instances;
    j["violations"] = rep.violations;
    j["passed"] = rep.passed;
    j["seed"] = rep.seed;
    j["trials"] = rep.trials;
    j["stats"] = rep.stats;
    return j;
}

inline std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot digest missing file " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

struct RunManifest {
    std::string version = "1.0.0";
    json config;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::uint64_t> task_seeds;
    std::string started, finished;
    std::map<std::string, std::string> output_digests;

    json to_json() const {
        json j;
        j["version"] = version;
        j["config"] = config;
        j["master_seed"] = master_seed;
        j["task_seeds"] = task_seeds;
        j["started"] = started;
        j["finished"] = finished;
        j["outputs"] = output_digests;
        return j;
    }

    void record_output(const std::string& path) {
        output_digests[path] = hex64(file_digest(path));
    }
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace exwalk::io
