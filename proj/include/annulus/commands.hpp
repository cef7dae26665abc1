#ifndef ANNULUS_COMMANDS_HPP
#define ANNULUS_COMMANDS_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "annulus/config.hpp"
#include "annulus/logging.hpp"
#include "annulus/radial_profile.hpp"
#include "annulus/report.hpp"
#include "annulus/solver.hpp"
#include "annulus/svg_plot.hpp"

namespace annulus {

/*
 * Batch workflows behind the CLI.  Exit codes: 0 success, 2 config or
 * parse error (raised as ConfigError and mapped by the caller), 3 solve
 * count shortfall, 4 hypothesis FAIL under --strict.
 */

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    out << content;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace detail

inline int cmd_constants(const ProblemConfig& cfg, const std::string& out_dir,
                         std::ostream& text)
{
    const AnnulusGeometry geom = cfg.geometry();
    const nlohmann::json j = constants_json(geom, cfg.omega1, cfg.omega2);

    char buf[512];
    std::snprintf(buf, sizeof buf, "geometry: n=%d  r0=%.17g  r1=%.17g\n",
                  geom.dimension(), geom.r0(), geom.r1());
    text << buf;
    std::snprintf(buf, sizeof buf, "alpha = %.17g\ninf d = %.17g\nsup d = %.17g\n",
                  j["alpha"].get<double>(), j["inf_d"].get<double>(),
                  j["sup_d"].get<double>());
    text << buf;
    for (int i = 0; i < 2; ++i) {
        const auto& c = j["components"][i];
        std::snprintf(buf, sizeof buf,
                      "component %d: omega=%.17g\n  m = %.17g\n  M = %.17g\n"
                      "  m* = %.17g\n  c_k = %.17g\n  c = %.17g\n  c^2 = %.17g\n"
                      "  growth coefficient (min{m,m*}-omega^2)/sup d = %.17g\n",
                      i + 1, c["omega"].get<double>(), c["m"].get<double>(),
                      c["M"].get<double>(), c["m_star"].get<double>(),
                      c["c_k"].get<double>(), c["c"].get<double>(),
                      c["c_squared"].get<double>(), c["growth_coefficient"].get<double>());
        text << buf;
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        detail::write_file(std::filesystem::path(out_dir) / "constants.json",
                           detail::dump_json(j));
    }
    return 0;
}

inline nlohmann::json check_bundle(const ProblemConfig& cfg)
{
    const NonlinearSystem sys = cfg.system();
    const RadiiLadder ladder = cfg.ladder();
    const SampleBudget budget{cfg.base_per_axis, cfg.refine_rounds};

    log_info("running (H) check, density " + std::to_string(cfg.h_density));
    const HCheckReport h = check_H(sys, cfg.h_density, cfg.effective_z_bound());

    nlohmann::json theorems = nlohmann::json::array();
    bool theorem_pass = false;
    if (ladder.is_four_level) {
        const TheoremVerdict v = check_theorem_multi2(sys, ladder, budget);
        theorem_pass = v.pass;
        theorems.push_back(to_json(v));
    } else {
        const TheoremVerdict v1 = check_theorem_ellyptic(sys, ladder, budget);
        const TheoremVerdict v2 = check_theorem_ellyptic2(sys, ladder, budget);
        theorem_pass = v1.pass || v2.pass;
        theorems.push_back(to_json(v1));
        theorems.push_back(to_json(v2));
    }
    return nlohmann::json{
        {"mode", ladder.is_four_level ? "four-level" : "two-level"},
        {"h_check", to_json(h)},
        {"theorems", theorems},
        {"overall_pass", h.pass && theorem_pass},
    };
}

inline int cmd_check(const ProblemConfig& cfg, const std::string& out_dir, bool strict,
                     std::ostream& text)
{
    const nlohmann::json bundle = check_bundle(cfg);
    text << "H: " << bundle["h_check"]["verdict"].get<std::string>()
         << "  (worst margin " << bundle["h_check"]["worst_margin"].get<double>() << ")\n";
    for (const auto& th : bundle["theorems"]) {
        text << "theorem " << th["theorem"].get<std::string>() << ": "
             << th["verdict"].get<std::string>() << "\n";
        for (const auto& c : th["conditions"]) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "  %-14s %-4s extremum=%.6g threshold=%.6g margin=%.6g\n",
                          c["id"].get<std::string>().c_str(),
                          c["verdict"].get<std::string>().c_str(),
                          c["extremum"].get<double>(), c["threshold"].get<double>(),
                          c["margin"].get<double>());
            text << buf;
        }
    }
    text << "overall: " << (bundle["overall_pass"].get<bool>() ? "hypotheses sampled-PASS" : "FAIL")
         << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        detail::write_file(std::filesystem::path(out_dir) / "check.json",
                           detail::dump_json(bundle));
    }
    if (strict && !bundle["overall_pass"].get<bool>())
        return 4;
    return 0;
}

inline int cmd_solve(const ProblemConfig& cfg, const std::string& out_dir, int threads,
                     std::ostream& text)
{
    const NonlinearSystem sys = cfg.system();
    const RadiiLadder ladder = cfg.ladder();
    SolveOptions opts;
    opts.grid_n = cfg.grid_n;
    opts.max_grid_n = cfg.max_grid_n;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.threads = threads;

    MultiSolveResult mr = multi_solve(sys, ladder, opts);

    // deterministic presentation order: by region, then by size
    std::stable_sort(mr.solutions.begin(), mr.solutions.end(),
                     [](const SolutionPair& a, const SolutionPair& b) {
                         if (a.region != b.region)
                             return static_cast<int>(a.region) < static_cast<int>(b.region);
                         return std::max(a.u.c1_norm(), a.v.c1_norm()) <
                                std::max(b.u.c1_norm(), b.v.c1_norm());
                     });

    std::filesystem::create_directories(out_dir);
    nlohmann::json sols = nlohmann::json::array();
    int k = 0;
    for (const SolutionPair& sp : mr.solutions) {
        ++k;
        const RadialProfile prof = reconstruct_radial(sys, sp);
        const std::string csv_name = "sol_" + std::to_string(k) + ".csv";
        const std::string svg_name = "sol_" + std::to_string(k) + ".svg";
        {
            std::ofstream csv(std::filesystem::path(out_dir) / csv_name, std::ios::binary);
            write_solution_csv(csv, prof);
        }
        {
            std::ofstream svg(std::filesystem::path(out_dir) / svg_name, std::ios::binary);
            write_solution_svg(svg, prof,
                               "solution " + std::to_string(k) + " (" +
                                   region_name(sp.region) + ")");
        }
        nlohmann::json sj = solution_json(sp, csv_name);
        sj["eqinterm_residual_sup"] = prof.eqinterm_residual_sup;
        sols.push_back(sj);

        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "solution %d: region=%s  residual=%.3e  |u|C1=%.6g  |v|C1=%.6g  "
                      "min u=%.6g  min v=%.6g\n",
                      k, region_name(sp.region), sp.residual_sup, sp.u.c1_norm(),
                      sp.v.c1_norm(), sp.u.min_value(), sp.v.min_value());
        text << buf;
    }

    nlohmann::json seed_notes = nlohmann::json::array();
    for (const SeedOutcome& s : mr.seeds) {
        if (s.status == SolveStatus::Converged || s.status == SolveStatus::ConvergedDegenerate)
            continue;
        seed_notes.push_back(nlohmann::json{
            {"seed", s.index},
            {"target", s.target},
            {"levels", {s.level_u, s.level_v}},
            {"note", s.note.empty() ? "no convergence" : s.note},
        });
    }

    const int nontrivial = count_nontrivial(mr);
    const int expected = ladder.is_four_level ? 3 : 1;
    nlohmann::json summary{
        {"constants", constants_json(sys.geometry(), cfg.omega1, cfg.omega2)},
        {"solutions", sols},
        {"nontrivial_count", nontrivial},
        {"expected_count", expected},
        {"failed_seeds", seed_notes},
    };
    detail::write_file(std::filesystem::path(out_dir) / "summary.json",
                       detail::dump_json(summary));

    text << "nontrivial distinct solutions: " << nontrivial << " (expected >= " << expected
         << ")\n";
    return nontrivial >= expected ? 0 : 3;
}

inline int cmd_nonexist(const ProblemConfig& cfg, const std::string& out_dir, int threads,
                        std::ostream& text)
{
    const NonlinearSystem sys = cfg.system();
    const SampleBudget budget{cfg.base_per_axis, cfg.refine_rounds};
    const double bound = cfg.effective_z_bound();

    const auto conds = check_nonexistence(sys, budget, bound, bound);
    const bool sign_ok = conds.first.pass || conds.second.pass;

    // 50-seed multistart over constants in (0, Z]^2
    SolveOptions opts;
    opts.grid_n = cfg.grid_n;
    opts.max_grid_n = cfg.max_grid_n;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    struct SweepHit {
        double u0, v0, sup;
    };
    std::vector<std::pair<double, double>> seeds;
    for (int a = 1; a <= 10; ++a)
        for (int b = 1; b <= 5; ++b)
            seeds.emplace_back(bound * a / 10.0, bound * b / 5.0);
    std::vector<SweepHit> hits(seeds.size(), SweepHit{0, 0, -1.0});
    parallel_for(static_cast<int>(seeds.size()), threads, [&](int idx) {
        const auto [u0, v0] = seeds[static_cast<std::size_t>(idx)];
        try {
            SolveOutcome so = newton_solve(
                sys,
                {GridFunction::constant(opts.grid_n, u0), GridFunction::constant(opts.grid_n, v0)},
                opts);
            const double sup = so.usable()
                                   ? std::max(so.pair.u.sup_norm(), so.pair.v.sup_norm())
                                   : std::numeric_limits<double>::infinity();
            hits[static_cast<std::size_t>(idx)] = {u0, v0, sup};
        } catch (const std::exception&) {
            hits[static_cast<std::size_t>(idx)] = {u0, v0, std::numeric_limits<double>::infinity()};
        }
    });
    int nontrivial = 0;
    double worst_sup = 0.0;
    for (const SweepHit& hit : hits) {
        if (hit.sup > 1e-6)
            ++nontrivial;
        if (std::isfinite(hit.sup))
            worst_sup = std::max(worst_sup, hit.sup);
    }

    const bool consistent = sign_ok && nontrivial == 0;
    nlohmann::json j{
        {"cond1", to_json(conds.first)},
        {"cond2", to_json(conds.second)},
        {"sweep",
         {{"seeds", static_cast<int>(seeds.size())},
          {"nontrivial", nontrivial},
          {"worst_sup_norm", worst_sup},
          {"bound", bound}}},
        {"verdict", consistent ? "consistent-with-nonexistence" : "inconclusive"},
    };
    text << "cond1 (f_i < 0 for w_i > 0): " << (conds.first.pass ? "PASS" : "FAIL") << "\n";
    text << "cond2 (f_i > 0 for w_i > 0): " << (conds.second.pass ? "PASS" : "FAIL") << "\n";
    text << "sweep: " << nontrivial << " nontrivial of " << seeds.size() << " seeds\n";
    text << "verdict: " << j["verdict"].get<std::string>() << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        detail::write_file(std::filesystem::path(out_dir) / "nonexist.json",
                           detail::dump_json(j));
    }
    return 0;
}

// the built-in worked example: two quartic-type nonlinearities with the
// radial perturbation h(r) = r^2/333 on the annulus 1 < |x| < e
inline ProblemConfig example_config()
{
    static const char* text = R"cfg(
[geometry]
n = 2
r0 = 1
r1 = 2.7182818284590452

[shift]
omega1 = 1
omega2 = 1

[nonlinearity]
f1 = "exp(-(gu^2+gv^2+6))*u*(u-1-r^2/333)*(u-2-r^2/333)*(u-4-r^2/333)*(2-cos(v))"
f2 = "exp(-(gu^2+gv^2+7))*v*(v-1-r^2/333)*(v-4-r^2/333)*(v-7-r^2/333)*(2-sin(u))"

[ladder]
rho1 = 0.5
rho2 = 0.5
s1 = 1.1
s2 = 2
theta1 = 3.5
theta2 = 6.5
sigma1 = 5
sigma2 = 8
)cfg";
    return ProblemConfig::parse(text);
}

inline int cmd_example(const std::string& out_dir, int threads, std::ostream& text)
{
    const ProblemConfig cfg = example_config();
    std::filesystem::create_directories(out_dir);
    detail::write_file(std::filesystem::path(out_dir) / "example.toml", cfg.serialize());

    text << "== constants ==\n";
    cmd_constants(cfg, out_dir, text);
    text << "== hypothesis check ==\n";
    const int rc_check = cmd_check(cfg, out_dir, false, text);
    text << "== solve ==\n";
    const int rc_solve = cmd_solve(cfg, out_dir, threads, text);
    return rc_solve != 0 ? rc_solve : rc_check;
}

} // namespace annulus

#endif
