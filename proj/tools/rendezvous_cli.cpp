// rendezvous: command-line front end for simulations, closed-form tables and
// exact oracle checks.
//
// Exit codes: 0 success, 1 internal error, 2 usage error, 3 infeasible spec,
// 4 enumeration guard violation.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rendezvous/rendezvous.hpp"

using namespace rendezvous;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit : int { kOk = 0, kInternal = 1, kUsage = 2, kInfeasible = 3, kGuard = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::uint32_t to_u32(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        auto v = std::stoul(s, &used);
        if (used != s.size() || v > 0xFFFFFFFFUL) throw std::out_of_range(what);
        return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + ": '" + s + "'");
    }
}

/// "lo:hi[:step]", inclusive; lo > hi gives an empty range.
std::vector<std::uint32_t> parse_range(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("range must be lo:hi[:step], got '" + text + "'");
    auto lo = to_u32(parts[0], "range start");
    auto hi = to_u32(parts[1], "range end");
    std::uint32_t step = parts.size() == 3 ? to_u32(parts[2], "range step") : 1;
    if (step == 0) throw UsageError("range step must be positive");
    std::vector<std::uint32_t> out;
    for (std::uint64_t v = lo; v <= hi; v += step) out.push_back(static_cast<std::uint32_t>(v));
    return out;
}

Drift parse_drift(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() == 1) return Drift::fixed(to_u32(parts[0], "drift"));
    if (parts.size() == 2) {
        auto lo = to_u32(parts[0], "drift low");
        auto hi = to_u32(parts[1], "drift high");
        if (lo > hi) throw UsageError("drift range lo > hi");
        return Drift::uniform(lo, hi);
    }
    throw UsageError("drift must be d or lo:hi, got '" + text + "'");
}

std::vector<std::uint32_t> parse_channels(const std::string& text) {
    std::vector<std::uint32_t> out;
    for (const auto& item : split(text, ',')) out.push_back(to_u32(item, "channel"));
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RENDEZVOUS_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("RENDEZVOUS_SEED is not an integer: '") + env + "'");
        }
    }
    return 0;
}

/// Arguments with output destinations removed and the seed made explicit, so
/// that replaying them reproduces the run.
std::vector<std::string> replay_args(const std::vector<std::string>& args, std::uint64_t seed) {
    std::vector<std::string> out;
    bool has_seed = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a == "--out" || a == "--manifest") {
            ++i;
            continue;
        }
        if (a.rfind("--out=", 0) == 0 || a.rfind("--manifest=", 0) == 0) continue;
        if (a == "--seed" || a.rfind("--seed=", 0) == 0) has_seed = true;
        out.push_back(a);
    }
    if (!has_seed && !out.empty() && (out[0] == "sim" || out[0] == "oracle")) {
        out.push_back("--seed");
        out.push_back(std::to_string(seed));
    }
    return out;
}

struct Output {
    std::string out_path;
    std::string manifest_path;
};

void emit(const Output& dest, const std::string& body) {
    if (dest.out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(dest.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + dest.out_path);
    f << body;
}

void write_manifest(const Output& dest, const std::string& command, const std::vector<std::string>& args,
                    std::uint64_t seed, const io::json& config, double seconds) {
    io::json m = {
        {"tool", "rendezvous"},
        {"version", kVersion},
        {"command", command},
        {"args", args},
        {"seed", seed},
        {"config", config},
        {"wall_clock_seconds", seconds},
    };
    std::string path = dest.manifest_path;
    if (path.empty() && !dest.out_path.empty()) path = dest.out_path + ".manifest.json";
    if (path.empty()) {
        std::cerr << m.dump() << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest " + path);
    f << m.dump(2) << '\n';
}

int run(const std::vector<std::string>& args, bool write_manifests);

// ---------------------------------------------------------------------------

struct SimOptions {
    std::string setting = "sync";
    std::vector<std::string> algs;
    std::uint32_t n_total = 64;
    std::uint32_t n1 = 15;
    std::uint32_t n2 = 15;
    std::string n12 = "";
    std::string n12_sweep = "";
    std::string layout = "uniform";
    std::uint64_t experiments = 500;
    std::uint64_t slots = 2000;
    std::string drift = "1:100";
    unsigned threads = 0;
    std::string format = "csv";
    bool paper_scale = false;
};

struct TheoryOptions {
    std::uint32_t n1 = 15;
    std::uint32_t n2 = 15;
    std::string n12 = "";
    std::string n12_sweep = "";
    std::uint32_t t0 = 20;
    double p = 0.75;
};

struct OracleOptions {
    std::uint32_t n_total = 0;
    std::string c1;
    std::string c2;
    std::string alg = "lsh2";
    std::uint64_t samples = 200'000;
};

std::vector<std::uint32_t> overlap_grid(const std::string& single, const std::string& sweep) {
    if (!single.empty() && !sweep.empty()) throw UsageError("give either --n12 or --n12-sweep, not both");
    if (!sweep.empty()) return parse_range(sweep);
    if (!single.empty()) return {to_u32(single, "n12")};
    throw UsageError("one of --n12 or --n12-sweep is required");
}

int cmd_sim(const SimOptions& o, std::uint64_t seed, const Output& dest, const std::vector<std::string>& args,
            bool write_manifests) {
    const auto start = std::chrono::steady_clock::now();
    SimulationConfig cfg;
    if (o.setting == "sync")
        cfg.setting = Setting::Sync;
    else if (o.setting == "async")
        cfg.setting = Setting::Async;
    else
        throw UsageError("--setting must be sync or async");
    cfg.experiments = o.paper_scale ? 10'000 : o.experiments;
    cfg.slots_budget = o.paper_scale ? 10'000 : o.slots;
    cfg.base_seed = seed;
    cfg.threads = o.threads;
    cfg.drift = parse_drift(o.drift);

    Layout layout;
    if (o.layout == "uniform")
        layout = Layout::Uniform;
    else if (o.layout == "contiguous")
        layout = Layout::Contiguous;
    else
        throw UsageError("--layout must be uniform or contiguous");

    std::vector<HopAlgorithm> algs;
    for (const auto& group : o.algs)
        for (const auto& name : split(group, ',')) algs.push_back(HopAlgorithm::parse(name));
    if (algs.empty()) throw UsageError("--alg is required");

    std::vector<InstanceSpec> specs;
    for (auto n12 : overlap_grid(o.n12, o.n12_sweep)) specs.push_back({o.n_total, o.n1, o.n2, n12, layout});
    for (const auto& s : specs) s.validate();

    SweepResult result = specs.empty() ? SweepResult{} : run_sweep(specs, algs, cfg);
    std::string body;
    if (o.format == "csv") {
        body = io::sweep_csv(result);
    } else if (o.format == "json") {
        body = io::sweep_json(result).dump(2) + "\n";
    } else {
        throw UsageError("--format must be csv or json");
    }
    emit(dest, body);

    if (write_manifests) {
        io::json config = {
            {"setting", o.setting},           {"algorithms", [&] {
                 std::vector<std::string> names;
                 for (const auto& a : algs) names.push_back(a.name());
                 return names;
             }()},
            {"N", o.n_total},                 {"n1", o.n1},
            {"n2", o.n2},                     {"n12", [&] {
                 std::vector<std::uint32_t> v;
                 for (const auto& s : specs) v.push_back(s.n12);
                 return v;
             }()},
            {"layout", o.layout},             {"experiments", cfg.experiments},
            {"slots", cfg.slots_budget},      {"drift", o.drift},
            {"threads", o.threads},           {"format", o.format},
        };
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(dest, "sim", args, seed, config, secs);
    }
    return kOk;
}

int cmd_theory(const TheoryOptions& o, const Output& dest, const std::vector<std::string>& args,
               bool write_manifests) {
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream os;
    os << io::kTheoryHeader << '\n';
    for (auto n12 : overlap_grid(o.n12, o.n12_sweep)) {
        theory::InstanceProfile p;
        try {
            p = theory::InstanceProfile(o.n1, o.n2, n12);
        } catch (const InvalidArgument& e) {
            throw InfeasibleSpec(e.what());
        }
        io::write_theory_row(os, p, o.t0, o.p);
    }
    emit(dest, os.str());
    if (write_manifests) {
        io::json config = {{"n1", o.n1}, {"n2", o.n2}, {"t0", o.t0}, {"p", o.p}};
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(dest, "theory", args, 0, config, secs);
    }
    return kOk;
}

int cmd_oracle(const OracleOptions& o, std::uint64_t seed, const Output& dest, const std::vector<std::string>& args,
               bool write_manifests) {
    const auto start = std::chrono::steady_clock::now();
    if (o.n_total == 0) throw UsageError("--N is required");
    ProblemInstance inst(ChannelSet(o.n_total, parse_channels(o.c1)), ChannelSet(o.n_total, parse_channels(o.c2)));
    theory::InstanceProfile profile(inst);
    const auto jac = oracle::exact_jaccard(inst);

    SimulationConfig cfg;
    cfg.base_seed = seed;
    std::ostringstream os;
    bool all_pass = true;
    auto verdict = [&](bool ok) {
        all_pass = all_pass && ok;
        return ok ? "PASS" : "FAIL";
    };
    auto mc_line = [&](const HopAlgorithm& alg, double exact) {
        const double mc = estimate_prob(inst, alg, cfg, o.samples);
        const double sigma = std::sqrt(std::max(exact * (1 - exact), 1e-300) / static_cast<double>(o.samples));
        os << "monte_carlo=" << io::fmt(mc) << " samples=" << o.samples << " exact_float=" << io::fmt(exact)
           << " within_3sigma " << verdict(std::abs(mc - exact) <= 3 * sigma + 1e-12) << '\n';
    };

    os << "instance N=" << inst.n_total() << " n1=" << inst.n1() << " n2=" << inst.n2() << " n12=" << inst.n12()
       << " algorithm=" << o.alg << '\n';
    if (o.alg == "lsh2") {
        const auto exact = oracle::exact_prob_lsh2(inst);
        os << "exact=" << exact.str() << " jaccard=" << jac.str() << ' ' << verdict(exact == jac) << '\n';
        os << "exact_float=" << io::fmt(exact.to_double()) << '\n';
        cfg.setting = Setting::Sync;
        mc_line(HopAlgorithm::lsh2(), exact.to_double());
        if (inst.n_total() <= oracle::kMaxNEttr) {
            const auto ettr = oracle::exact_ettr_sync_lsh2(inst);
            os << "exact_ettr=" << ettr.str() << " (" << io::fmt(ettr.to_double())
               << ") limit_1_over_J=" << io::fmt(theory::lsh2_limit_ettr(profile)) << " bounded_by_N "
               << verdict(ettr.to_double() >= 1.0 && ettr.to_double() <= inst.n_total()) << '\n';
        }
    } else if (o.alg == "lsh3") {
        const auto exact = oracle::exact_prob_lsh3(inst, true);
        const double approx = theory::lsh3_prob_approx(profile);
        os << "exact=" << exact.str() << " exact_float=" << io::fmt(exact.to_double())
           << " approx=" << io::fmt(approx) << '\n';
        const auto zero = oracle::exact_prob_lsh3(inst, false);
        os << "exact_zero_drift=" << zero.str() << " jaccard=" << jac.str() << ' ' << verdict(zero == jac) << '\n';
        cfg.setting = Setting::Async;
        cfg.drift = Drift::fixed(inst.n_total());  // U(0) and U(N) are independent draws
        mc_line(HopAlgorithm::lsh3(), exact.to_double());
    } else {
        throw UsageError("oracle --alg must be lsh2 or lsh3");
    }
    emit(dest, os.str());
    if (write_manifests) {
        io::json config = {{"N", o.n_total}, {"c1", o.c1}, {"c2", o.c2}, {"alg", o.alg}, {"samples", o.samples}};
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(dest, "oracle", args, seed, config, secs);
    }
    return all_pass ? kOk : kInternal;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_path) {
    std::ifstream f(manifest_path);
    if (!f) throw UsageError("cannot read manifest " + manifest_path);
    io::json m;
    try {
        m = io::json::parse(f);
    } catch (const io::json::exception& e) {
        throw UsageError(std::string("malformed manifest: ") + e.what());
    }
    auto args = m.at("args").get<std::vector<std::string>>();
    if (!out_path.empty()) {
        args.push_back("--out");
        args.push_back(out_path);
    }
    return run(args, false);
}

int run(const std::vector<std::string>& args, bool write_manifests) {
    CLI::App app{"Channel-hopping rendezvous simulator and oracle", "rendezvous"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Output dest;
    std::uint64_t seed = 0;
    bool seed_given = false;

    SimOptions sim;
    auto* sim_cmd = app.add_subcommand("sim", "Monte Carlo ETTR/MTTR sweep, CSV or JSON");
    sim_cmd->add_option("--setting", sim.setting, "sync or async")->capture_default_str();
    sim_cmd->add_option("--alg", sim.algs, "random, synmac, lsh, lsh2, lsh3, lsh4:T0:p (comma-separated)")
        ->required();
    sim_cmd->add_option("--N", sim.n_total, "number of channels")->capture_default_str();
    sim_cmd->add_option("--n1", sim.n1)->capture_default_str();
    sim_cmd->add_option("--n2", sim.n2)->capture_default_str();
    sim_cmd->add_option("--n12", sim.n12, "number of common channels");
    sim_cmd->add_option("--n12-sweep", sim.n12_sweep, "lo:hi[:step]");
    sim_cmd->add_option("--layout", sim.layout, "uniform or contiguous")->capture_default_str();
    sim_cmd->add_option("--experiments", sim.experiments)->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--slots", sim.slots, "slot budget per experiment")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--drift", sim.drift, "async clock drift: d or lo:hi")->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)")->capture_default_str();
    sim_cmd->add_option("--format", sim.format, "csv or json")->capture_default_str();
    sim_cmd->add_flag("--paper-scale", sim.paper_scale, "10,000 experiments x 10,000 slots");

    TheoryOptions th;
    auto* theory_cmd = app.add_subcommand("theory", "Closed-form values over a profile grid");
    theory_cmd->add_option("--n1", th.n1)->capture_default_str();
    theory_cmd->add_option("--n2", th.n2)->capture_default_str();
    theory_cmd->add_option("--n12", th.n12);
    theory_cmd->add_option("--n12-sweep", th.n12_sweep, "lo:hi[:step]");
    theory_cmd->add_option("--t0", th.t0, "LSH4 multiset size")->capture_default_str()->check(CLI::PositiveNumber);
    theory_cmd->add_option("--p", th.p, "LSH4 mixing probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));

    OracleOptions orc;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exact enumeration vs approximation vs Monte Carlo");
    oracle_cmd->add_option("--N", orc.n_total)->required();
    oracle_cmd->add_option("--c1", orc.c1, "comma-separated channels")->required();
    oracle_cmd->add_option("--c2", orc.c2, "comma-separated channels")->required();
    oracle_cmd->add_option("--alg", orc.alg, "lsh2 or lsh3")->capture_default_str();
    oracle_cmd->add_option("--samples", orc.samples)->capture_default_str()->check(CLI::PositiveNumber);

    for (auto* cmd : {sim_cmd, theory_cmd, oracle_cmd}) {
        cmd->add_option("--out", dest.out_path, "write output here instead of stdout");
        cmd->add_option("--manifest", dest.manifest_path, "manifest path (default: <out>.manifest.json or stderr)");
    }
    for (auto* cmd : {sim_cmd, oracle_cmd})
        cmd->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& s) {
                seed = s;
                seed_given = true;
            },
            "base seed (default: $RENDEZVOUS_SEED or 0)");

    std::string replay_manifest, replay_out;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay_cmd->add_option("--manifest", replay_manifest)->required();
    replay_cmd->add_option("--out", replay_out);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*replay_cmd) return cmd_replay(replay_manifest, replay_out);
    if (!seed_given) seed = default_seed();
    const auto recorded = replay_args(args, seed);
    if (*sim_cmd) return cmd_sim(sim, seed, dest, recorded, write_manifests);
    if (*theory_cmd) return cmd_theory(th, dest, recorded, write_manifests);
    return cmd_oracle(orc, seed, dest, recorded, write_manifests);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args, true);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InfeasibleSpec& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfeasible;
    } catch (const InvalidInstance& e) {
        std::cerr << "error: invalid instance: " << e.what() << '\n';
        return kInfeasible;
    } catch (const GuardViolation& e) {
        std::cerr << "error: " << e.what() << " (suggested max N = " << e.max_n() << ")\n";
        return kGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
}
