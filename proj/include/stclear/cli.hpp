// Command-line entry points: clear, verify, sweep.
#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stclear/builtins.hpp"
#include "stclear/io.hpp"
#include "stclear/settlement.hpp"
#include "stclear/solve.hpp"
#include "stclear/sweep.hpp"
#include "stclear/verify.hpp"

namespace stclear::cli {

struct RunConfig {
    std::string builtin;
    std::string scenario_path;
    std::string out_dir = ".";
    bool verify = false;
    std::vector<std::string> checks;
    std::string sweep_spec;
    std::string format = "both";  // json | csv | both
    std::vector<std::string> tol_overrides;
    bool dump_basis = false;
    bool dump_lp = false;
    std::string replay_path;
    unsigned profile_seed = 1;
};

namespace detail {

inline Scenario resolve_scenario(const RunConfig& cfg) {
    if (!cfg.builtin.empty() && !cfg.scenario_path.empty())
        throw std::runtime_error("--builtin and --scenario are mutually exclusive");
    if (!cfg.scenario_path.empty()) return load_scenario(cfg.scenario_path);
    if (cfg.builtin.empty()) throw std::runtime_error("no scenario given; use --builtin or --scenario");

    const std::string& b = cfg.builtin;
    auto starts = [&](const char* p) { return b.rfind(p, 0) == 0; };
    if (starts("temporal:")) return builtin_temporal(std::stoi(b.substr(9)));
    if (starts("sevenbus:")) return builtin_seven_bus(std::stoi(b.substr(9)));
    if (b == "ieee30") return builtin_ieee30(true, ieee30_profile(cfg.profile_seed));
    if (b == "ieee30:novl") return builtin_ieee30(false, ieee30_profile(cfg.profile_seed));
    throw std::runtime_error("unknown builtin selector '" + b +
                             "' (temporal:<1-9>, sevenbus:<1-7>, ieee30[:novl])");
}

struct Tolerances {
    SolveOptions solve;
    VerifyOptions verify;
};

inline Tolerances parse_tolerances(const std::vector<std::string>& overrides) {
    Tolerances t;
    for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--tol expects name=value");
        std::string name = kv.substr(0, eq);
        double value = std::stod(kv.substr(eq + 1));
        if (value <= 0.0) throw std::runtime_error("tolerances must be > 0");
        if (name == "feas") t.solve.eps_feas = value;
        else if (name == "comp") t.solve.eps_comp = value;
        else if (name == "gap") t.solve.eps_gap = value;
        else if (name == "check") t.verify.tol = value;
        else if (name == "cleared") t.verify.cleared_tol = value;
        else throw std::runtime_error("unknown tolerance '" + name + "'");
    }
    return t;
}

inline void ensure_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

inline std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline json basis_to_json(const ClearingSolution& cs) {
    IndexMap names(cs.scenario, cs.lp);
    json j;
    j["basis"] = cs.sol.basis;
    json dual = json::object();
    for (int r = 0; r < cs.lp.num_rows(); ++r) dual[names.row(r)] = cs.sol.dual[r];
    j["dual"] = dual;
    return j;
}

inline std::vector<double> parse_grid(const std::string& spec) {
    // a:b:step, inclusive
    auto c1 = spec.find(':');
    auto c2 = spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::runtime_error("grid expects a:b:step");
    double a = std::stod(spec.substr(0, c1));
    double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    double step = std::stod(spec.substr(c2 + 1));
    if (step <= 0 || b < a) throw std::runtime_error("grid must be increasing");
    std::vector<double> grid;
    for (double v = a; v <= b + 1e-12; v += step) grid.push_back(v);
    if (grid.empty()) throw std::runtime_error("empty grid");
    return grid;
}

}  // namespace detail

inline int cmd_clear(const RunConfig& cfg) {
    detail::Tolerances tol = detail::parse_tolerances(cfg.tol_overrides);
    Scenario sc = detail::resolve_scenario(cfg);
    auto violations = validate(sc);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "invalid scenario: " << v.entity << ": " << v.message << "\n";
        return 1;
    }
    detail::ensure_dir(cfg.out_dir);
    ClearingSolution cs;
    cs.scenario = sc;
    cs.lp = build(sc);
    cs.layout = clearing_layout(sc);
    {
        auto sol = solve(cs.lp, tol.solve);
        cs.sol = std::move(sol);
    }
    if (cs.sol.status == simplex::Status::infeasible) {
        std::cerr << "scenario is infeasible\n";
        return 2;
    }
    if (cs.sol.status != simplex::Status::optimal) {
        std::cerr << "solve ended with status " << simplex::to_string(cs.sol.status) << "\n";
        return 1;
    }
    cs.balance_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    cs.comp_hi_row.assign(cs.balance_row.size(), -1);
    cs.comp_lo_row.assign(cs.balance_row.size(), -1);
    for (int r = 0; r < cs.lp.num_rows(); ++r) {
        const RowRef& ref = cs.lp.rows[r].ref;
        if (ref.kind == RowKind::balance) cs.balance_row[cs.st(ref.entity, ref.time)] = r;
        else if (ref.kind == RowKind::computing_hi) cs.comp_hi_row[cs.st(ref.entity, ref.time)] = r;
        else if (ref.kind == RowKind::computing_lo) cs.comp_lo_row[cs.st(ref.entity, ref.time)] = r;
    }

    Settlement st = settle(cs);
    bool write_json = cfg.format == "json" || cfg.format == "both";
    bool write_csv = cfg.format == "csv" || cfg.format == "both";
    if (write_json) {
        write_file(detail::join(cfg.out_dir, "solution.json"), solution_to_json(cs).dump(2) + "\n");
        write_file(detail::join(cfg.out_dir, "settlement.json"), settlement_to_json(st).dump(2) + "\n");
        write_file(detail::join(cfg.out_dir, "lmp_stats.json"),
                   lmp_stats_to_json(lmp_stats(cs.price_vector())).dump(2) + "\n");
    }
    if (write_csv) {
        write_file(detail::join(cfg.out_dir, "settlement.csv"), settlement_csv(cs, st));
        write_file(detail::join(cfg.out_dir, "prices.csv"), prices_csv(cs));
        write_file(detail::join(cfg.out_dir, "lmp_histogram.csv"),
                   histogram_csv(lmp_histogram(cs.price_vector())));
        if (!sc.lines.empty()) write_file(detail::join(cfg.out_dir, "edges.csv"), edges_csv(cs, st));
    }
    if (cfg.dump_lp)
        write_file(detail::join(cfg.out_dir, "problem.lp"), export_lp_format(sc, cs.lp));
    if (cfg.dump_basis)
        write_file(detail::join(cfg.out_dir, "basis.json"), detail::basis_to_json(cs).dump(2) + "\n");

    std::cout << "scenario " << sc.name << ": surplus " << fmt6(-cs.sol.objective) << ", "
              << cs.sol.iterations << " iterations\n";

    if (cfg.verify) {
        VerificationReport rep = run_verification(cs, st, cfg.checks, tol.verify);
        std::cout << verification_text(rep);
        if (write_json)
            write_file(detail::join(cfg.out_dir, "verification.json"),
                       verification_to_json(rep).dump(2) + "\n");
        if (!rep.all_pass()) return 1;
    }
    return 0;
}

inline int cmd_verify(const RunConfig& cfg) {
    detail::Tolerances tol = detail::parse_tolerances(cfg.tol_overrides);
    Scenario sc = detail::resolve_scenario(cfg);
    auto violations = validate(sc);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "invalid scenario: " << v.entity << ": " << v.message << "\n";
        return 1;
    }
    ClearingSolution cs;
    if (!cfg.replay_path.empty()) {
        std::ifstream in(cfg.replay_path);
        if (!in) {
            std::cerr << "cannot open replay file " << cfg.replay_path << "\n";
            return 1;
        }
        json j;
        try {
            in >> j;
            cs = replay_solution(sc, j);
        } catch (const std::exception& e) {
            std::cerr << "replay failed: " << e.what() << "\n";
            return 1;
        }
    } else {
        cs = clear_scenario(sc, tol.solve);
        if (!cs.sol.optimal()) {
            std::cerr << "solve ended with status " << simplex::to_string(cs.sol.status) << "\n";
            return cs.sol.status == simplex::Status::infeasible ? 2 : 1;
        }
    }
    Settlement st = settle(cs);
    VerificationReport rep = run_verification(cs, st, cfg.checks, tol.verify);
    std::cout << verification_text(rep);
    detail::ensure_dir(cfg.out_dir);
    write_file(detail::join(cfg.out_dir, "verification.json"),
               verification_to_json(rep).dump(2) + "\n");
    write_file(detail::join(cfg.out_dir, "verification.txt"), verification_text(rep));
    return rep.all_pass() ? 0 : 1;
}

inline int cmd_sweep(const RunConfig& cfg) {
    if (cfg.sweep_spec.empty()) {
        std::cerr << "sweep needs --sweep link=<id>[+<id>...],grid=a:b:step or chain=temporal:1-9\n";
        return 1;
    }
    detail::ensure_dir(cfg.out_dir);

    if (cfg.sweep_spec.rfind("chain=", 0) == 0) {
        std::string spec = cfg.sweep_spec.substr(6);
        std::vector<Scenario> chain;
        auto colon = spec.find(':');
        auto dash = spec.find('-', colon);
        if (colon == std::string::npos || dash == std::string::npos)
            throw std::runtime_error("chain expects family:a-b");
        std::string family = spec.substr(0, colon);
        int a = std::stoi(spec.substr(colon + 1, dash - colon - 1));
        int b = std::stoi(spec.substr(dash + 1));
        std::ostringstream os;
        os << "scenario,surplus\n";
        for (int id = a; id <= b; ++id) {
            Scenario sc = family == "temporal" ? builtin_temporal(id) : builtin_seven_bus(id);
            auto cs = clear_scenario(sc);
            os << sc.name << ',' << fmt6(-cs.sol.objective) << '\n';
        }
        write_file(detail::join(cfg.out_dir, "chain.csv"), os.str());
        std::cout << os.str();
        return 0;
    }

    // link=<id>[+<id>...],grid=a:b:step[,grid_extra=v]
    std::vector<std::string> links;
    std::vector<double> grid;
    std::vector<double> extras;
    std::stringstream ss(cfg.sweep_spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.rfind("link=", 0) == 0) {
            std::stringstream ls(part.substr(5));
            std::string id;
            while (std::getline(ls, id, '+')) links.push_back(id);
        } else if (part.rfind("grid=", 0) == 0) {
            grid = detail::parse_grid(part.substr(5));
        } else if (part.rfind("extra=", 0) == 0) {
            extras.push_back(std::stod(part.substr(6)));
        } else {
            throw std::runtime_error("unknown sweep spec part '" + part + "'");
        }
    }
    for (double e : extras) grid.push_back(e);
    if (links.empty() || grid.empty()) {
        std::cerr << "sweep spec needs both link= and grid=\n";
        return 1;
    }
    Scenario sc = detail::resolve_scenario(cfg);
    SweepReport rep = capacity_sweep(sc, links, grid);
    write_file(detail::join(cfg.out_dir, "sweep.csv"), sweep_csv(rep));
    write_file(detail::join(cfg.out_dir, "sweep.json"), sweep_to_json(rep).dump(2) + "\n");
    write_file(detail::join(cfg.out_dir, "histogram_first.csv"),
               histogram_csv(lmp_histogram(rep.points.front().prices)));
    write_file(detail::join(cfg.out_dir, "histogram_last.csv"),
               histogram_csv(lmp_histogram(rep.points.back().prices)));
    for (const CheckRecord* r :
         {&rep.unchanged_when_slack, &rep.unit_profit_monotone, &rep.gap_bounded_by_cost}) {
        std::cout << r->name << ": " << to_string(r->status) << " residual " << fmt6(r->max_residual)
                  << "\n";
    }
    bool failed = rep.unchanged_when_slack.status == CheckStatus::fail ||
                  rep.unit_profit_monotone.status == CheckStatus::fail ||
                  rep.gap_bounded_by_cost.status == CheckStatus::fail;
    return failed ? 1 : 0;
}

inline int cli_main(std::vector<std::string> args) {
    CLI::App app{"stclear: space-time electricity market clearing"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--builtin", cfg.builtin,
                        "builtin selector: temporal:<1-9>, sevenbus:<1-7>, ieee30[:novl]");
        sub->add_option("--scenario", cfg.scenario_path, "scenario JSON file");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--checks", cfg.checks, "enabled checks")->delimiter(',');
        sub->add_option("--format", cfg.format, "json|csv|both")
            ->check(CLI::IsMember({"json", "csv", "both"}));
        sub->add_option("--tol", cfg.tol_overrides, "tolerance overrides name=value")
            ->delimiter(',');
        sub->add_option("--profile-seed", cfg.profile_seed, "ieee30 demand profile seed");
    };

    CLI::App* clear = app.add_subcommand("clear", "solve and settle a scenario");
    add_common(clear);
    clear->add_flag("--verify", cfg.verify, "run the verification suite after clearing");
    clear->add_flag("--dump-basis", cfg.dump_basis, "write the final basis and duals");
    clear->add_flag("--dump-lp", cfg.dump_lp, "export the clearing LP in LP text format");

    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    add_common(verify);
    verify->add_option("--replay", cfg.replay_path, "verify a dumped solution instead of solving");

    CLI::App* sweep = app.add_subcommand("sweep", "capacity sweeps and scenario chains");
    add_common(sweep);
    sweep->add_option("--sweep", cfg.sweep_spec, "link=<id>[+<id>...],grid=a:b:step or chain=...");

    std::vector<const char*> argv;
    std::string prog = "stclear";
    argv.push_back(prog.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (clear->parsed()) return cmd_clear(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace stclear::cli
