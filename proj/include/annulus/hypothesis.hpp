#ifndef ANNULUS_HYPOTHESIS_HPP
#define ANNULUS_HYPOTHESIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "annulus/nonlinear_system.hpp"

namespace annulus {

/*
 * Verdict machinery for the existence / multiplicity / non-existence
 * theorems.  The five-dimensional boxes are the product sets of the
 * theory, extrema of f_i over a box are estimated by a deterministic
 * tensor grid followed by per-coordinate refinement, and each condition
 * becomes a ConditionReport with the estimated extremum, the threshold
 * and the witness point.
 *
 * Verdicts are sampled, not certified: a PASS means the inequality held
 * at every sample with a positive margin.
 */

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool degenerate() const { return lo == hi; }
};

// coordinates ordered as the arguments of f: (r, w1, w2, z1, z2)
struct Box5 {
    std::array<Interval, 5> iv{};
    Interval& operator[](int k) { return iv[static_cast<std::size_t>(k)]; }
    const Interval& operator[](int k) const { return iv[static_cast<std::size_t>(k)]; }
};

enum class BoxKind { OmegaTilde, ATilde, OmegaTildeStar };

inline Box5 make_box(BoxKind kind, int i, double l1, double l2,
                     const AnnulusGeometry& geom, double c1, double c2)
{
    if (kind != BoxKind::OmegaTildeStar && i != 1 && i != 2)
        throw std::invalid_argument("make_box: component index must be 1 or 2");
    if (!(l1 > 0.0) || !(l2 > 0.0))
        throw std::invalid_argument("make_box: levels must be positive");
    const double alpha = geom.alpha();
    Box5 b;
    b[0] = {geom.r0(), geom.r1()};
    switch (kind) {
    case BoxKind::OmegaTilde:
        b[1] = (i == 1) ? Interval{l1, l1 / c1} : Interval{0.0, l1 / c1};
        b[2] = (i == 2) ? Interval{l2, l2 / c2} : Interval{0.0, l2 / c2};
        b[3] = {0.0, alpha * l1 / c1};
        b[4] = {0.0, alpha * l2 / c2};
        break;
    case BoxKind::ATilde:
        b[1] = (i == 1) ? Interval{c1 * l1, l1} : Interval{0.0, l1};
        b[2] = (i == 2) ? Interval{c2 * l2, l2} : Interval{0.0, l2};
        b[3] = {0.0, alpha * l1};
        b[4] = {0.0, alpha * l2};
        break;
    case BoxKind::OmegaTildeStar:
        b[1] = {0.0, l1 / c1};
        b[2] = {0.0, l2 / c2};
        b[3] = {0.0, alpha * l1 / c1};
        b[4] = {0.0, alpha * l2 / c2};
        break;
    }
    return b;
}

class LadderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/*
 * Threshold tuples.  Two-level ladders (rho, s) feed the single-solution
 * theorems, four-level ladders (rho, s, theta, sigma) the three-solution
 * theorem.  Orderings that do not involve the cone constants are enforced
 * at construction; the c-dependent gap conditions are checked by
 * validate() once the shifts are known.
 */
struct RadiiLadder {
    double rho1 = 0.0, rho2 = 0.0;
    double s1 = 0.0, s2 = 0.0;
    double theta1 = 0.0, theta2 = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0;
    bool is_four_level = false;

    static RadiiLadder two_level(double rho1, double rho2, double s1, double s2)
    {
        RadiiLadder l;
        l.rho1 = rho1; l.rho2 = rho2; l.s1 = s1; l.s2 = s2;
        l.is_four_level = false;
        require(rho1 > 0 && rho2 > 0 && s1 > 0 && s2 > 0, "ladder levels must be positive");
        require(rho1 < s1 && rho2 < s2, "ladder requires rho_i < s_i");
        return l;
    }

    static RadiiLadder four_level(double rho1, double rho2, double s1, double s2,
                                  double theta1, double theta2, double sigma1,
                                  double sigma2)
    {
        RadiiLadder l;
        l.rho1 = rho1; l.rho2 = rho2; l.s1 = s1; l.s2 = s2;
        l.theta1 = theta1; l.theta2 = theta2; l.sigma1 = sigma1; l.sigma2 = sigma2;
        l.is_four_level = true;
        require(rho1 > 0 && rho2 > 0 && s1 > 0 && s2 > 0 && theta1 > 0 &&
                    theta2 > 0 && sigma1 > 0 && sigma2 > 0,
                "ladder levels must be positive");
        require(rho1 < s1 && rho2 < s2, "ladder requires rho_i < s_i");
        require(s1 < theta1 && s2 < theta2, "ladder requires s_i < theta_i");
        require(theta1 < sigma1 && theta2 < sigma2, "ladder requires theta_i < sigma_i");
        return l;
    }

    // gap conditions that involve the cone constants c_i
    void validate(double c1, double c2) const
    {
        const double c[2] = {c1, c2};
        if (!is_four_level) {
            const double rho[2] = {rho1, rho2};
            const double s[2] = {s1, s2};
            for (int i = 0; i < 2; ++i)
                if (!(rho[i] / c[i] < c[i] * s[i]))
                    throw LadderError("ladder requires rho_" + std::to_string(i + 1) +
                                      "/c < c*s_" + std::to_string(i + 1));
        } else {
            const double s[2] = {s1, s2};
            const double th[2] = {theta1, theta2};
            for (int i = 0; i < 2; ++i)
                if (!(s[i] / c[i] < c[i] * th[i])) {
                    std::string msg = "ladder requires s_" + std::to_string(i + 1) +
                                      "/c < c*theta_" + std::to_string(i + 1);
                    if (s[i] / c[i] < th[i])
                        msg += " (only the weaker s/c < theta holds)";
                    throw LadderError(msg);
                }
        }
    }

private:
    static void require(bool ok, const char* msg)
    {
        if (!ok)
            throw LadderError(msg);
    }
};

struct SampleBudget {
    int base_per_axis = 9;
    int refine_rounds = 3;
};

enum class ExtremumMode { Inf, Sup };

struct Extremum {
    double value = 0.0;
    std::array<double, 5> witness{};
    long samples = 0;
};

namespace detail {

inline std::vector<double> linspace(const Interval& iv, int n)
{
    if (iv.degenerate() || n <= 1)
        return {iv.lo};
    std::vector<double> pts(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        pts[static_cast<std::size_t>(j)] =
            iv.lo + (iv.hi - iv.lo) * static_cast<double>(j) / (n - 1);
    pts.back() = iv.hi;
    return pts;
}

inline double eval_box_point(const Expr& f, const std::array<double, 5>& x)
{
    try {
        return f.eval(x[0], x[1], x[2], x[3], x[4]);
    } catch (const EvalError& e) {
        throw EvalError(std::string(e.what()) + " at (r=" + std::to_string(x[0]) +
                        ", w1=" + std::to_string(x[1]) + ", w2=" + std::to_string(x[2]) +
                        ", z1=" + std::to_string(x[3]) + ", z2=" + std::to_string(x[4]) + ")");
    }
}

} // namespace detail

/*
 * Deterministic box extremum: full tensor scan at base_per_axis points
 * per axis, then refine_rounds sweeps of per-coordinate refinement, each
 * sweep shrinking a bracket around the incumbent coordinate by halving.
 * Increasing the budget can only improve the incumbent.
 */
inline Extremum box_extremum(const Expr& f, const Box5& box, ExtremumMode mode,
                             const SampleBudget& budget)
{
    if (budget.base_per_axis < 3)
        throw std::invalid_argument("box_extremum: base_per_axis must be >= 3");
    const int base = budget.base_per_axis;

    std::array<std::vector<double>, 5> axis;
    for (int k = 0; k < 5; ++k)
        axis[static_cast<std::size_t>(k)] = detail::linspace(box[k], base);

    const auto better = [mode](double cand, double best) {
        return mode == ExtremumMode::Sup ? cand > best : cand < best;
    };

    Extremum ext;
    ext.value = (mode == ExtremumMode::Sup)
                    ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity();

    // tensor scan
    std::array<std::size_t, 5> idx{};
    std::array<double, 5> x{};
    for (;;) {
        for (int k = 0; k < 5; ++k)
            x[static_cast<std::size_t>(k)] = axis[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
        const double val = detail::eval_box_point(f, x);
        ++ext.samples;
        if (better(val, ext.value)) {
            ext.value = val;
            ext.witness = x;
        }
        int k = 4;
        while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == axis[static_cast<std::size_t>(k)].size()) {
            idx[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0)
            break;
    }

    // coordinate refinement around the incumbent
    for (int round = 0; round < budget.refine_rounds; ++round) {
        for (int k = 0; k < 5; ++k) {
            const Interval& iv = box[k];
            if (iv.degenerate())
                continue;
            double w = (iv.hi - iv.lo) / (base - 1);
            for (int halving = 0; halving < 60; ++halving) {
                const double cx = ext.witness[static_cast<std::size_t>(k)];
                const double lo = std::max(iv.lo, cx - w);
                const double hi = std::min(iv.hi, cx + w);
                if (!(hi > lo))
                    break;
                for (int j = 0; j < base; ++j) {
                    x = ext.witness;
                    x[static_cast<std::size_t>(k)] =
                        lo + (hi - lo) * static_cast<double>(j) / (base - 1);
                    const double val = detail::eval_box_point(f, x);
                    ++ext.samples;
                    if (better(val, ext.value)) {
                        ext.value = val;
                        ext.witness = x;
                    }
                }
                w *= 0.5;
                if (w < 1e-17 * (std::abs(cx) + iv.hi - iv.lo))
                    break;
            }
        }
    }
    return ext;
}

struct ConditionReport {
    std::string id;          // e.g. "pde1[i=1]"
    bool pass = false;
    ExtremumMode kind = ExtremumMode::Inf;
    double extremum = 0.0;
    double threshold = 0.0;
    double margin = 0.0;     // threshold-extremum for sup, extremum-threshold for inf
    std::array<double, 5> witness{};
    long samples = 0;
    bool certified = false;  // reserved for a future interval backend
};

struct TheoremVerdict {
    std::string theorem;
    bool pass = false;
    std::vector<ConditionReport> conditions;
};

namespace detail {

// strict inequality with a relative floor against floating-point ties
inline bool strict_pass(double margin, double extremum, double threshold)
{
    const double scale = std::max(std::abs(extremum), std::abs(threshold));
    return margin > 1e-12 * scale;
}

inline ConditionReport report_from(const std::string& id, ExtremumMode mode,
                                   const Extremum& ext, double threshold)
{
    ConditionReport r;
    r.id = id;
    r.kind = mode;
    r.extremum = ext.value;
    r.threshold = threshold;
    r.margin = (mode == ExtremumMode::Sup) ? threshold - ext.value
                                           : ext.value - threshold;
    r.witness = ext.witness;
    r.samples = ext.samples;
    r.pass = strict_pass(r.margin, r.extremum, r.threshold);
    return r;
}

// threshold coefficient (min{m_i, m_i*} - omega_i^2) / sup d
inline double growth_coefficient(const NonlinearSystem& sys, int i)
{
    const KernelConstants kc = sys.constants(i);
    return (std::min(kc.m, kc.m_star) - sys.omega(i) * sys.omega(i)) / sys.sup_d();
}

} // namespace detail

inline TheoremVerdict check_theorem_ellyptic(const NonlinearSystem& sys,
                                             const RadiiLadder& ladder,
                                             const SampleBudget& budget)
{
    if (ladder.is_four_level)
        throw LadderError("theorem needs a two-level ladder (rho, s)");
    const double c1 = sys.constants(1).c, c2 = sys.constants(2).c;
    ladder.validate(c1, c2);

    TheoremVerdict v;
    v.theorem = "ellyptic";
    const AnnulusGeometry& geom = sys.geometry();
    for (int i = 1; i <= 2; ++i) {
        const Box5 box = make_box(BoxKind::OmegaTilde, i, ladder.rho1, ladder.rho2, geom, c1, c2);
        const Extremum ext = box_extremum(sys.f(i), box, ExtremumMode::Inf, budget);
        v.conditions.push_back(detail::report_from(
            "pde1[i=" + std::to_string(i) + "]", ExtremumMode::Inf, ext, 0.0));
    }
    const double s[2] = {ladder.s1, ladder.s2};
    for (int i = 1; i <= 2; ++i) {
        const Box5 box = make_box(BoxKind::ATilde, i, ladder.s1, ladder.s2, geom, c1, c2);
        const Extremum ext = box_extremum(sys.f(i), box, ExtremumMode::Sup, budget);
        const double thr = detail::growth_coefficient(sys, i) * s[i - 1];
        v.conditions.push_back(detail::report_from(
            "pde2[i=" + std::to_string(i) + "]", ExtremumMode::Sup, ext, thr));
    }
    v.pass = std::all_of(v.conditions.begin(), v.conditions.end(),
                         [](const ConditionReport& r) { return r.pass; });
    return v;
}

inline TheoremVerdict check_theorem_ellyptic2(const NonlinearSystem& sys,
                                              const RadiiLadder& ladder,
                                              const SampleBudget& budget)
{
    if (ladder.is_four_level)
        throw LadderError("theorem needs a two-level ladder (rho, s)");
    const double c1 = sys.constants(1).c, c2 = sys.constants(2).c;
    ladder.validate(c1, c2);

    TheoremVerdict v;
    v.theorem = "ellyptic2";
    const AnnulusGeometry& geom = sys.geometry();
    const Box5 star = make_box(BoxKind::OmegaTildeStar, 1, ladder.rho1, ladder.rho2, geom, c1, c2);
    const double rho[2] = {ladder.rho1, ladder.rho2};
    bool some_i = false;
    for (int i = 1; i <= 2; ++i) {
        const Extremum ext = box_extremum(sys.f(i), star, ExtremumMode::Inf, budget);
        const double w2 = sys.omega(i) * sys.omega(i);
        const double thr = w2 * rho[i - 1] / sys.inf_d();
        ConditionReport r = detail::report_from(
            "pde3[i=" + std::to_string(i) + "]", ExtremumMode::Inf, ext, thr);
        some_i = some_i || r.pass;
        v.conditions.push_back(std::move(r));
    }
    const double s[2] = {ladder.s1, ladder.s2};
    bool all_pde4 = true;
    for (int i = 1; i <= 2; ++i) {
        const Box5 box = make_box(BoxKind::ATilde, i, ladder.s1, ladder.s2, geom, c1, c2);
        const Extremum ext = box_extremum(sys.f(i), box, ExtremumMode::Sup, budget);
        const double thr = detail::growth_coefficient(sys, i) * s[i - 1];
        ConditionReport r = detail::report_from(
            "pde4[i=" + std::to_string(i) + "]", ExtremumMode::Sup, ext, thr);
        all_pde4 = all_pde4 && r.pass;
        v.conditions.push_back(std::move(r));
    }
    // (pde3) is required for some i only
    v.pass = some_i && all_pde4;
    return v;
}

inline TheoremVerdict check_theorem_multi2(const NonlinearSystem& sys,
                                           const RadiiLadder& ladder,
                                           const SampleBudget& budget)
{
    if (!ladder.is_four_level)
        throw LadderError("theorem needs a four-level ladder (rho, s, theta, sigma)");
    const double c1 = sys.constants(1).c, c2 = sys.constants(2).c;
    ladder.validate(c1, c2);

    TheoremVerdict v;
    v.theorem = "multi2";
    const AnnulusGeometry& geom = sys.geometry();

    struct Stage {
        const char* name;
        BoxKind kind;
        ExtremumMode mode;
        double l1, l2;
        bool growth_threshold;
    };
    const Stage stages[4] = {
        {"uno", BoxKind::ATilde, ExtremumMode::Sup, ladder.rho1, ladder.rho2, true},
        {"due", BoxKind::OmegaTilde, ExtremumMode::Inf, ladder.s1, ladder.s2, false},
        {"tre", BoxKind::ATilde, ExtremumMode::Sup, ladder.theta1, ladder.theta2, true},
        {"quattro", BoxKind::OmegaTilde, ExtremumMode::Inf, ladder.sigma1, ladder.sigma2, false},
    };
    for (const Stage& st : stages) {
        const double levels[2] = {st.l1, st.l2};
        for (int i = 1; i <= 2; ++i) {
            const Box5 box = make_box(st.kind, i, st.l1, st.l2, geom, c1, c2);
            const Extremum ext = box_extremum(sys.f(i), box, st.mode, budget);
            const double thr = st.growth_threshold
                                   ? detail::growth_coefficient(sys, i) * levels[i - 1]
                                   : 0.0;
            v.conditions.push_back(detail::report_from(
                std::string(st.name) + "[i=" + std::to_string(i) + "]", st.mode, ext, thr));
        }
    }
    v.pass = std::all_of(v.conditions.begin(), v.conditions.end(),
                         [](const ConditionReport& r) { return r.pass; });
    return v;
}

/*
 * Sign conditions of the non-existence theorem, sampled with w_i in
 * (delta, w_bound] (delta keeps the open constraint w_i > 0 away from 0)
 * and the remaining coordinates in [0, w_bound] x [0, z_bound]^2.
 */
inline std::pair<ConditionReport, ConditionReport>
check_nonexistence(const NonlinearSystem& sys, const SampleBudget& budget,
                   double w_bound, double z_bound)
{
    if (!(w_bound > 0.0) || !(z_bound >= 0.0))
        throw std::invalid_argument("check_nonexistence: bad sampling bounds");
    const double delta = 1e-6;
    const AnnulusGeometry& geom = sys.geometry();

    auto box_for = [&](int i) {
        Box5 b;
        b[0] = {geom.r0(), geom.r1()};
        b[1] = (i == 1) ? Interval{delta, w_bound} : Interval{0.0, w_bound};
        b[2] = (i == 2) ? Interval{delta, w_bound} : Interval{0.0, w_bound};
        b[3] = {0.0, z_bound};
        b[4] = {0.0, z_bound};
        return b;
    };

    // cond1: f_i < 0 wherever w_i > 0, i.e. sup f_i < 0 for both i
    ConditionReport cond1;
    cond1.id = "cond1";
    cond1.kind = ExtremumMode::Sup;
    cond1.threshold = 0.0;
    cond1.extremum = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 2; ++i) {
        const Extremum ext = box_extremum(sys.f(i), box_for(i), ExtremumMode::Sup, budget);
        cond1.samples += ext.samples;
        if (ext.value > cond1.extremum) {
            cond1.extremum = ext.value;
            cond1.witness = ext.witness;
        }
    }
    cond1.margin = -cond1.extremum;
    cond1.pass = detail::strict_pass(cond1.margin, cond1.extremum, 0.0);

    // cond2: f_i > 0 wherever w_i > 0, i.e. inf f_i > 0 for both i
    ConditionReport cond2;
    cond2.id = "cond2";
    cond2.kind = ExtremumMode::Inf;
    cond2.threshold = 0.0;
    cond2.extremum = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 2; ++i) {
        const Extremum ext = box_extremum(sys.f(i), box_for(i), ExtremumMode::Inf, budget);
        cond2.samples += ext.samples;
        if (ext.value < cond2.extremum) {
            cond2.extremum = ext.value;
            cond2.witness = ext.witness;
        }
    }
    cond2.margin = cond2.extremum;
    cond2.pass = detail::strict_pass(cond2.margin, cond2.extremum, 0.0);

    return {cond1, cond2};
}

} // namespace annulus

#endif
