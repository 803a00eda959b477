// Command line front end: simulate | build-layers | lil | verify.
// Exit codes: 0 pass, 1 test failure, 2 usage or config error, 3 runtime.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "exwalk/harness.hpp"
#include "exwalk/io.hpp"
#include "exwalk/verify.hpp"
#include "exwalk/walk.hpp"

namespace fs = std::filesystem;
using namespace exwalk;

namespace {

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Global {
    std::uint64_t seed = 1;
    std::uint64_t threads = 0;
    std::string out_dir = ".";
    std::string config;
};

std::string joined(const Global& g, const std::string& name) {
    return (fs::path(g.out_dir) / name).string();
}

void write_manifest(const Global& g, const std::string& task,
                    const io::json& config, const std::string& started,
                    const std::vector<std::string>& outputs) {
    io::RunManifest man;
    man.config = config;
    man.master_seed = g.seed;
    man.task_seeds[task] = rng::derive_key(g.seed, task, 0);
    man.started = started;
    man.finished = now_utc();
    for (const auto& p : outputs) man.record_output(p);
    io::write_text(joined(g, task + "_manifest.json"), man.to_json().dump(2) + "\n");
}

int cmd_simulate(const Global& g, std::uint64_t n, std::uint64_t trials) {
    std::string started = now_utc();
    std::ostringstream csv;
    csv << "trial,seed,n,final_position,min,max,range\n";
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::uint64_t key = rng::derive_key(g.seed, "simulate", t);
        WalkCursor c(key);
        for (std::uint64_t i = 0; i < n; ++i) c.step();
        csv << t << ',' << key << ',' << n << ',' << c.position() << ','
            << c.min() << ',' << c.max() << ',' << c.range() << '\n';
    }
    std::string out = joined(g, "walks.csv");
    io::write_text(out, csv.str());
    io::json cfg = {{"n", n}, {"trials", trials}, {"seed", g.seed}};
    write_manifest(g, "simulate", cfg, started, {out});
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_build_layers(const Global& g, const std::string& fspec, double m0,
                     double xmax, std::string out) {
    std::string started = now_utc();
    SpeedFunction f = fspec.rfind("table:", 0) == 0
                          ? io::parse_speed_table(fspec.substr(6))
                          : io::parse_speed(fspec);
    auto layers = build_layers(f, m0, xmax);
    if (out.empty()) out = joined(g, "layers.json");
    io::write_text(out, io::layers_to_json(layers).dump(2) + "\n");
    io::json cfg = {{"f", fspec}, {"m0", m0}, {"xmax", xmax}};
    write_manifest(g, "build-layers", cfg, started, {out});
    std::cout << "wrote " << out << " (" << layers.size() << " layers"
              << (layers.diffusive_tail ? ", diffusive tail" : "") << ")\n";
    return 0;
}

int cmd_lil(const Global& g, std::string records_out, std::string summary_out) {
    std::string started = now_utc();
    if (g.config.empty()) {
        std::cerr << "lil requires --config with an experiment spec\n";
        return 2;
    }
    std::ifstream in(g.config);
    if (!in) {
        std::cerr << "cannot open config " << g.config << "\n";
        return 2;
    }
    io::ResolvedExperiment rx;
    try {
        rx = io::parse_experiment_config(io::json::parse(in));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    io::json echo = io::resolved_config(rx);  // before any thread override
    if (g.threads) rx.cfg.threads = g.threads;

    auto records = run_experiment(rx.cfg);
    if (records_out.empty()) records_out = joined(g, "records.csv");
    if (summary_out.empty()) summary_out = joined(g, "summary.json");
    io::write_text(records_out, io::lil_records_csv(records));

    io::json summary;
    summary["config"] = echo;
    summary["records"] = records.size();
    auto up = band_summary_up_g(records, rx.cfg.m_burnin);
    summary["r_up_g"] = {{"sup", up.final_sup}, {"inf", up.final_inf}};
    try {
        auto lo = band_summary_lo_h_rangelow(records, rx.cfg.m_burnin);
        summary["r_lo_h_rangelow"] = {{"sup", lo.final_sup}, {"inf", lo.final_inf}};
    } catch (const std::invalid_argument&) {
        summary["r_lo_h_rangelow"] = nullptr;  // no range-low checkpoints seen
    }
    auto marks = extremal_time_marks(records);
    summary["tags"] = {{"low", marks.low.size()},
                       {"high", marks.high.size()},
                       {"neutral", marks.neutral.size()}};
    io::write_text(summary_out, summary.dump(2) + "\n");
    write_manifest(g, "lil", echo, started,
                   {records_out, summary_out});
    std::cout << "wrote " << records_out << " and " << summary_out << "\n";
    return 0;
}

int cmd_verify(const Global& g, const std::string& suite, std::string out,
               std::uint64_t trials, std::uint64_t n) {
    std::string started = now_utc();
    std::vector<VerifyReport> reports;
    bool exact = suite == "exact" || suite == "all";
    bool mc = suite == "mc" || suite == "all";

    if (exact) {
        // Oracle equivalence over all short paths.
        VerifyReport oracle;
        oracle.name = "oracle_equivalence";
        oracle.mode = "exact";
        const std::uint64_t len = 10;
        for (std::uint64_t bits = 0; bits < (1ull << len); ++bits) {
            std::vector<std::int8_t> inc;
            for (std::uint64_t i = 0; i < len; ++i)
                inc.push_back((bits >> i) & 1 ? 1 : -1);
            auto traj = Trajectory::from_increments(std::move(inc));
            for (std::int64_t k : {1, 2, 3}) {
                auto field = excursion_field(traj, k, len);
                for (std::int64_t x = -static_cast<std::int64_t>(len);
                     x <= static_cast<std::int64_t>(len); ++x) {
                    ++oracle.instances;
                    if (field.at(x) !=
                        brute_force_excursion_oracle(traj.positions(), k, x, len))
                        ++oracle.violations;
                }
            }
        }
        oracle.passed = oracle.violations == 0;
        reports.push_back(oracle);
        for (std::int64_t k : {1, 2, 3})
            for (std::uint64_t a : {1ull, 2ull})
                reports.push_back(reflection_identity_check(k, a, 12));
    }
    if (mc) {
        reports.push_back(nk_concentration(8, n, trials, g.seed, g.threads));
        reports.push_back(tkn_concentration(8, n, trials, g.seed, 0.25, g.threads));
        reports.push_back(max_excursion_tail(8, n, trials, g.seed, g.threads));
        reports.push_back(truncated_sum_bounds(8, 4, n, trials, g.seed, g.threads));
        reports.push_back(local_time_tail(std::max<std::uint64_t>(n, 10000),
                                          trials, g.seed, g.threads));
        reports.push_back(small_ball_trend({n / 4, n, n * 4}, trials, g.seed,
                                           g.threads));
    }

    io::json j = io::json::array();
    bool all_pass = true;
    for (const auto& rep : reports) {
        j.push_back(io::report_to_json(rep));
        all_pass = all_pass && rep.passed;
        std::cout << (rep.passed ? "[PASS] " : "[FAIL] ") << rep.name << "\n";
    }
    if (out.empty()) out = joined(g, "report.json");
    io::write_text(out, j.dump(2) + "\n");
    io::json cfg = {{"suite", suite}, {"trials", trials}, {"n", n},
                    {"seed", g.seed}};
    write_manifest(g, "verify", cfg, started, {out});
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"excursion statistics and scaling-law laboratory"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--threads", g.threads, "worker threads (0: all cores)");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--config", g.config, "JSON config path");

    auto* sim = app.add_subcommand("simulate", "trajectory summaries");
    std::uint64_t sim_n = 1u << 20, sim_trials = 8;
    sim->add_option("--n", sim_n, "steps per trial");
    sim->add_option("--trials", sim_trials, "number of trials");

    auto* bl = app.add_subcommand("build-layers", "construct (k_s, l_s) from f");
    std::string bl_f = "powerlaw:0.75", bl_out;
    double bl_m0 = 2.0, bl_xmax = 1e18;
    bl->add_option("--f", bl_f, "powerlaw:ALPHA[:eps=E] or table:PATH");
    bl->add_option("--m0", bl_m0, "growth factor");
    bl->add_option("--xmax", bl_xmax, "construction horizon");
    bl->add_option("--out", bl_out, "output path");

    auto* lil = app.add_subcommand("lil", "checkpointed ratio experiment");
    std::string lil_out, lil_summary;
    lil->add_option("--out", lil_out, "records csv path");
    lil->add_option("--summary", lil_summary, "summary json path");

    auto* ver = app.add_subcommand("verify", "identity and concentration suite");
    std::string ver_suite = "all", ver_out;
    std::uint64_t ver_trials = 2000, ver_n = 1u << 16;
    ver->add_option("--suite", ver_suite, "exact | mc | all")
        ->check(CLI::IsMember({"exact", "mc", "all"}));
    ver->add_option("--out", ver_out, "report json path");
    ver->add_option("--trials", ver_trials, "Monte Carlo trials per test");
    ver->add_option("--n", ver_n, "Monte Carlo walk length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        fs::create_directories(g.out_dir);
        if (sim->parsed()) return cmd_simulate(g, sim_n, sim_trials);
        if (bl->parsed()) return cmd_build_layers(g, bl_f, bl_m0, bl_xmax, bl_out);
        if (lil->parsed()) return cmd_lil(g, lil_out, lil_summary);
        if (ver->parsed())
            return cmd_verify(g, ver_suite, ver_out, ver_trials, ver_n);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
