#ifndef ANNULUS_SOLVER_HPP
#define ANNULUS_SOLVER_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "annulus/grid_function.hpp"
#include "annulus/hypothesis.hpp"
#include "annulus/linband.hpp"
#include "annulus/nonlinear_system.hpp"
#include "annulus/parallel.hpp"
#include "annulus/quadrature.hpp"

namespace annulus {

/*
 * Discrete machinery for the transformed system
 *
 *   -u'' + omega_1^2 u = g_1(t, u, v, |u'|, |v'|),   u'(0) = u'(1) = 0,
 *   -v'' + omega_2^2 v = g_2(t, u, v, |u'|, |v'|),   v'(0) = v'(1) = 0.
 *
 * apply_T evaluates the Hammerstein operator by composite Gauss-Legendre
 * panels on the grid cells (the kernel factorizes across the diagonal, so
 * the split quadrature reduces to prefix sums of per-cell moments).
 *
 * newton_solve runs damped Newton on the second-order finite-difference
 * collocation, refines the grid N -> 2N-1 with Richardson extrapolation,
 * and reports the residual of the integrated form
 *
 *   u'(t) + int_0^t d(s) f(...) ds = 0,
 *
 * which is equivalent to the ODE with its boundary conditions but can be
 * evaluated to ~1e-11 where a direct second-derivative residual drowns
 * in rounding.
 *
 * multi_solve seeds constants in the ladder regions, pushes each seed
 * into the cone with a few Picard steps, polishes with Newton, dedupes
 * and classifies.
 */

enum class Region { Trivial, S1, S2, S3, Other };

inline const char* region_name(Region r)
{
    switch (r) {
    case Region::Trivial: return "trivial";
    case Region::S1: return "S1";
    case Region::S2: return "S2";
    case Region::S3: return "S3";
    case Region::Other: return "other";
    }
    return "?";
}

struct SolutionPair {
    GridFunction u, v;
    double residual_sup = std::numeric_limits<double>::infinity();
    double cone_margin_1 = 0.0; // min u - c_1 ||u||_C1
    double cone_margin_2 = 0.0;
    Region region = Region::Other;
    std::array<bool, 2> nonconstant{false, false};
};

struct SolveOptions {
    int grid_n = 257;      // initial grid, odd, >= 65
    int max_grid_n = 2049; // refinement cap
    double tol = 1e-8;     // target residual_sup
    int max_iter = 50;     // Newton iterations per grid
    bool richardson = true;
    int threads = 0;       // 0 = hardware concurrency (multi_solve only)
};

enum class SolveStatus {
    Converged,
    ConvergedDegenerate, // converged but the Jacobian is singular (e.g. f == 0)
    ToleranceNotReached, // Newton fine, residual floor above tol at max grid
    NoConvergence,
    SingularJacobian,
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::NoConvergence;
    SolutionPair pair;
    std::string note;
    int finest_grid = 0;
    bool usable() const
    {
        return status == SolveStatus::Converged ||
               status == SolveStatus::ConvergedDegenerate;
    }
};

class PicardDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// geometry samples shared by the grid operators
struct GridGeometry {
    int n;
    double h;
    std::vector<double> t, r, d, abs_rp;
    GridGeometry(const AnnulusGeometry& geom, int n_) : n(n_), h(1.0 / (n_ - 1))
    {
        t.resize(static_cast<std::size_t>(n));
        r.resize(static_cast<std::size_t>(n));
        d.resize(static_cast<std::size_t>(n));
        abs_rp.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const std::size_t js = static_cast<std::size_t>(j);
            t[js] = static_cast<double>(j) / (n - 1);
            r[js] = geom.r_of_t(t[js]);
            d[js] = geom.d_of_t(t[js]);
            abs_rp[js] = std::abs(geom.rprime_of_t(t[js]));
        }
    }
};

// d(t_j) * f_i(r, u, v, |u'|/|r'|, |v'|/|r'|) at node j; g_i minus the shift
inline double df_node(const NonlinearSystem& sys, const GridGeometry& gg, int i, int j,
                      double u, double v, double pu, double pv)
{
    const std::size_t js = static_cast<std::size_t>(j);
    return gg.d[js] * sys.f(i).eval(gg.r[js], u, v, pu / gg.abs_rp[js], pv / gg.abs_rp[js]);
}

/*
 * Per-cell Gauss-Legendre moments of a nodal function against a weight
 * callable w(s); the integrand is the piecewise-cubic interpolant of the
 * nodal samples.  Returns one moment per grid cell.
 */
template <class W>
std::vector<double> cell_moments(const std::vector<double>& nodal, double h, W&& w)
{
    const int n = static_cast<int>(nodal.size());
    const int cells = n - 1;
    const GaussLegendre& gl = GaussLegendre::get(8);
    std::vector<double> mom(static_cast<std::size_t>(cells), 0.0);

    // Lagrange cubic basis at the 8 panel points, for the three stencil
    // placements (first cell, interior, last cell)
    double basis[3][8][4];
    double xi_off[3] = {0.0, 1.0, 2.0};
    for (int variant = 0; variant < 3; ++variant)
        for (int q = 0; q < 8; ++q) {
            const double xi = xi_off[variant] + 0.5 * (gl.nodes[static_cast<std::size_t>(q)] + 1.0);
            for (int a = 0; a < 4; ++a) {
                double prod = 1.0;
                for (int b = 0; b < 4; ++b)
                    if (b != a)
                        prod *= (xi - b) / (a - b);
                basis[variant][q][a] = prod;
            }
        }

    for (int c = 0; c < cells; ++c) {
        int start = std::clamp(c - 1, 0, n - 4);
        int variant = c - start; // 0, 1 or 2
        double acc = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double s = (static_cast<double>(c) +
                              0.5 * (gl.nodes[static_cast<std::size_t>(q)] + 1.0)) * h;
            double gval = 0.0;
            for (int a = 0; a < 4; ++a)
                gval += basis[variant][q][a] * nodal[static_cast<std::size_t>(start + a)];
            acc += gl.weights[static_cast<std::size_t>(q)] * w(s) * gval;
        }
        mom[static_cast<std::size_t>(c)] = acc * 0.5 * h;
    }
    return mom;
}

} // namespace detail

/*
 * Nystrom evaluation of T(u,v): values and derivatives of both components
 * on the same grid.  The quadrature is split at each target node because
 * panels coincide with grid cells.
 */
inline std::pair<GridFunction, GridFunction>
apply_T(const NonlinearSystem& sys, const GridFunction& u, const GridFunction& v)
{
    if (u.n() != v.n())
        throw std::invalid_argument("apply_T: component grids differ");
    const int n = u.n();
    detail::GridGeometry gg(sys.geometry(), n);

    std::pair<GridFunction, GridFunction> out{GridFunction(n), GridFunction(n)};
    for (int i = 1; i <= 2; ++i) {
        const double omega = sys.omega(i);
        const double w2 = omega * omega;
        const double sinh_omega = std::sinh(omega);

        std::vector<double> gn(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const std::size_t js = static_cast<std::size_t>(j);
            const double shift = w2 * (i == 1 ? u.values[js] : v.values[js]);
            gn[js] = detail::df_node(sys, gg, i, j, u.values[js], v.values[js],
                                     std::abs(u.derivs[js]), std::abs(v.derivs[js])) + shift;
        }

        const auto a = detail::cell_moments(gn, gg.h, [omega](double s) { return std::cosh(omega * s); });
        const auto b = detail::cell_moments(gn, gg.h, [omega](double s) { return std::cosh(omega * (1.0 - s)); });

        // prefix sums: A_m = sum of a over cells left of node m, B_m the rest
        std::vector<double> A(static_cast<std::size_t>(n), 0.0), B(static_cast<std::size_t>(n), 0.0);
        for (int m = 1; m < n; ++m)
            A[static_cast<std::size_t>(m)] = A[static_cast<std::size_t>(m - 1)] + a[static_cast<std::size_t>(m - 1)];
        for (int m = n - 2; m >= 0; --m)
            B[static_cast<std::size_t>(m)] = B[static_cast<std::size_t>(m + 1)] + b[static_cast<std::size_t>(m)];

        GridFunction& dst = (i == 1) ? out.first : out.second;
        for (int m = 0; m < n; ++m) {
            const std::size_t ms = static_cast<std::size_t>(m);
            const double tm = gg.t[ms];
            dst.values[ms] = (std::cosh(omega * (1.0 - tm)) * A[ms] +
                              std::cosh(omega * tm) * B[ms]) /
                             (omega * sinh_omega);
            dst.derivs[ms] = (-std::sinh(omega * (1.0 - tm)) * A[ms] +
                              std::sinh(omega * tm) * B[ms]) /
                             sinh_omega;
        }
    }
    return out;
}

// fixed-point iteration of T; conditions seeds into the cone
inline std::pair<GridFunction, GridFunction>
picard_refine(const NonlinearSystem& sys, std::pair<GridFunction, GridFunction> seed, int iters)
{
    for (int it = 0; it < iters; ++it) {
        seed = apply_T(sys, seed.first, seed.second);
        if (std::max(seed.first.c1_norm(), seed.second.c1_norm()) > 1e6)
            throw PicardDivergence("picard_refine: iterate exceeded C1 norm 1e6");
    }
    return seed;
}

/*
 * residual of the integrated form: max over nodes and components of
 * |w'(t_j) + int_0^{t_j} d f| (the j = 0 term is the left boundary
 * condition, the j = N-1 term contains the right one).
 */
inline double integrated_residual(const NonlinearSystem& sys, const GridFunction& u,
                                  const GridFunction& v)
{
    const int n = u.n();
    detail::GridGeometry gg(sys.geometry(), n);
    double worst = 0.0;
    for (int i = 1; i <= 2; ++i) {
        std::vector<double> fn(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const std::size_t js = static_cast<std::size_t>(j);
            fn[js] = detail::df_node(sys, gg, i, j, u.values[js], v.values[js],
                                     std::abs(u.derivs[js]), std::abs(v.derivs[js]));
        }
        const auto mom = detail::cell_moments(fn, gg.h, [](double) { return 1.0; });
        const GridFunction& w = (i == 1) ? u : v;
        double cum = 0.0;
        worst = std::max(worst, std::abs(w.derivs[0]));
        for (int j = 1; j < n; ++j) {
            cum += mom[static_cast<std::size_t>(j - 1)];
            worst = std::max(worst, std::abs(w.derivs[static_cast<std::size_t>(j)] + cum));
        }
    }
    return worst;
}

namespace detail {

struct GridNewtonResult {
    bool converged = false;
    bool degenerate = false;
    std::string fail_reason;
};

// 2n residual of the collocation equations, interleaved (u_j, v_j)
inline void collocation_residual(const NonlinearSystem& sys, const GridGeometry& gg,
                                 const std::vector<double>& x, std::vector<double>& F)
{
    const int n = gg.n;
    const double h = gg.h;
    F.assign(static_cast<std::size_t>(2 * n), 0.0);
    auto U = [&x](int j) { return x[static_cast<std::size_t>(2 * j)]; };
    auto V = [&x](int j) { return x[static_cast<std::size_t>(2 * j + 1)]; };

    F[0] = (-3.0 * U(0) + 4.0 * U(1) - U(2)) / (2.0 * h);
    F[1] = (-3.0 * V(0) + 4.0 * V(1) - V(2)) / (2.0 * h);
    F[static_cast<std::size_t>(2 * n - 2)] =
        (3.0 * U(n - 1) - 4.0 * U(n - 2) + U(n - 3)) / (2.0 * h);
    F[static_cast<std::size_t>(2 * n - 1)] =
        (3.0 * V(n - 1) - 4.0 * V(n - 2) + V(n - 3)) / (2.0 * h);

    for (int j = 1; j < n - 1; ++j) {
        const double pu = std::abs((U(j + 1) - U(j - 1)) / (2.0 * h));
        const double pv = std::abs((V(j + 1) - V(j - 1)) / (2.0 * h));
        const double lap_u = ((U(j + 1) - U(j)) - (U(j) - U(j - 1))) / (h * h);
        const double lap_v = ((V(j + 1) - V(j)) - (V(j) - V(j - 1))) / (h * h);
        // -u'' + w^2 u - g collapses to -u'' - d f since the shift cancels
        F[static_cast<std::size_t>(2 * j)] =
            -lap_u - df_node(sys, gg, 1, j, U(j), V(j), pu, pv);
        F[static_cast<std::size_t>(2 * j + 1)] =
            -lap_v - df_node(sys, gg, 2, j, U(j), V(j), pu, pv);
    }
}

inline double sup_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

// analytic diffusion part plus finite-difference coupling of g
inline void assemble_jacobian(const NonlinearSystem& sys, const GridGeometry& gg,
                              const std::vector<double>& x, BandMatrix& J)
{
    const int n = gg.n;
    const double h = gg.h;
    const int dim = 2 * n;
    J.clear();

    // boundary closures
    J.at(0, 0) = -3.0 / (2.0 * h);
    J.at(0, 2) = 4.0 / (2.0 * h);
    J.at(0, 4) = -1.0 / (2.0 * h);
    J.at(1, 1) = -3.0 / (2.0 * h);
    J.at(1, 3) = 4.0 / (2.0 * h);
    J.at(1, 5) = -1.0 / (2.0 * h);
    J.at(dim - 2, dim - 2) = 3.0 / (2.0 * h);
    J.at(dim - 2, dim - 4) = -4.0 / (2.0 * h);
    J.at(dim - 2, dim - 6) = 1.0 / (2.0 * h);
    J.at(dim - 1, dim - 1) = 3.0 / (2.0 * h);
    J.at(dim - 1, dim - 3) = -4.0 / (2.0 * h);
    J.at(dim - 1, dim - 5) = 1.0 / (2.0 * h);

    const double eps_abs = 1e-12; // |u'| smoothing inside the Jacobian
    for (int j = 1; j < n - 1; ++j) {
        const double uj = x[static_cast<std::size_t>(2 * j)];
        const double vj = x[static_cast<std::size_t>(2 * j + 1)];
        const double du = (x[static_cast<std::size_t>(2 * (j + 1))] -
                           x[static_cast<std::size_t>(2 * (j - 1))]) / (2.0 * h);
        const double dv = (x[static_cast<std::size_t>(2 * (j + 1) + 1)] -
                           x[static_cast<std::size_t>(2 * (j - 1) + 1)]) / (2.0 * h);
        const double pu = std::abs(du);
        const double pv = std::abs(dv);
        const double su = du / std::sqrt(du * du + eps_abs * eps_abs);
        const double sv = dv / std::sqrt(dv * dv + eps_abs * eps_abs);

        for (int i = 1; i <= 2; ++i) {
            const int row = 2 * j + (i - 1);
            const double g0 = df_node(sys, gg, i, j, uj, vj, pu, pv);
            const double step_u = 1e-7 * (1.0 + std::abs(uj));
            const double step_v = 1e-7 * (1.0 + std::abs(vj));
            const double step_p = 1e-7 * (1.0 + pu);
            const double step_q = 1e-7 * (1.0 + pv);
            const double dg_du = (df_node(sys, gg, i, j, uj + step_u, vj, pu, pv) - g0) / step_u;
            const double dg_dv = (df_node(sys, gg, i, j, uj, vj + step_v, pu, pv) - g0) / step_v;
            const double dg_dp = (df_node(sys, gg, i, j, uj, vj, pu + step_p, pv) - g0) / step_p;
            const double dg_dq = (df_node(sys, gg, i, j, uj, vj, pu, pv + step_q) - g0) / step_q;

            // the omega^2 shift cancelled in F, so only -d f couples here
            const int cu = 2 * j, cv = 2 * j + 1;
            const int self = (i == 1) ? cu : cv;
            J.at(row, self) += 2.0 / (h * h);
            J.at(row, cu) += -dg_du;
            J.at(row, cv) += -dg_dv;
            J.at(row, self - 2) += -1.0 / (h * h);
            J.at(row, self + 2) += -1.0 / (h * h);
            // |u'| and |v'| enter via central differences of the neighbours
            J.at(row, cu - 2) += dg_dp * su / (2.0 * h);
            J.at(row, cu + 2) += -dg_dp * su / (2.0 * h);
            J.at(row, cv - 2) += dg_dq * sv / (2.0 * h);
            J.at(row, cv + 2) += -dg_dq * sv / (2.0 * h);
        }
    }
}

// the closure rows annihilate constants, so a near-zero image of the
// all-ones vector on the interior rows flags a singular linearization
inline bool probe_degenerate(const BandMatrix& J)
{
    const int dim = J.size();
    std::vector<double> ones(static_cast<std::size_t>(dim), 1.0);
    const auto img = J.apply(ones);
    double eta = 0.0;
    for (int r = 2; r < dim - 2; ++r)
        eta = std::max(eta, std::abs(img[static_cast<std::size_t>(r)]));
    return eta <= 1e-8;
}

/*
 * Damped Newton on one grid.  The Jacobian couples each node to its
 * neighbours only, giving bandwidth 4 in the interleaved ordering; the
 * diffusion part is analytic and the g-coupling uses forward differences
 * with relative step 1e-7.  |u'| is smoothed inside the Jacobian only.
 */
inline GridNewtonResult newton_on_grid(const NonlinearSystem& sys, const GridGeometry& gg,
                                       std::vector<double>& x, const SolveOptions& opts)
{
    const int n = gg.n;
    const double h = gg.h;
    const int dim = 2 * n;
    GridNewtonResult res;

    std::vector<double> F, Ftrial, xtrial, delta;
    collocation_residual(sys, gg, x, F);
    double fnorm = sup_norm(F);
    BandMatrix J(dim, 4, 4);

    const auto floor_of = [&](const std::vector<double>& xv) {
        const double scale = 1.0 + sup_norm(xv);
        return 4.0 * std::numeric_limits<double>::epsilon() * scale *
               (2.0 / (h * h) + sys.omega(1) * sys.omega(1) + sys.omega(2) * sys.omega(2) + 1.0);
    };

    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        const double floor = floor_of(x);
        if (fnorm <= floor) {
            res.converged = true;
            break;
        }
        if (iter == opts.max_iter) {
            if (fnorm <= 32.0 * floor) {
                res.converged = true;
                break;
            }
            res.fail_reason = "no convergence after " + std::to_string(opts.max_iter) +
                              " Newton iterations (|F| = " + std::to_string(fnorm) + ")";
            return res;
        }

        assemble_jacobian(sys, gg, x, J);
        if (!J.factor()) {
            if (fnorm <= 64.0 * floor) {
                res.converged = true;
                res.degenerate = true;
                break;
            }
            res.fail_reason = "singular Jacobian";
            return res;
        }

        delta = F;
        for (double& d : delta)
            d = -d;
        J.solve(delta);

        // Armijo backtracking on |F|
        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 30; ++back) {
            xtrial.resize(static_cast<std::size_t>(dim));
            for (int k = 0; k < dim; ++k)
                xtrial[static_cast<std::size_t>(k)] =
                    x[static_cast<std::size_t>(k)] + lambda * delta[static_cast<std::size_t>(k)];
            collocation_residual(sys, gg, xtrial, Ftrial);
            const double ftrial = sup_norm(Ftrial);
            if (ftrial <= (1.0 - 1e-4 * lambda) * fnorm || ftrial <= floor) {
                x.swap(xtrial);
                F.swap(Ftrial);
                fnorm = ftrial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            if (fnorm <= 32.0 * floor) {
                res.converged = true;
                break;
            }
            res.fail_reason = "line search stalled (|F| = " + std::to_string(fnorm) + ")";
            return res;
        }
        if (lambda == 1.0 && sup_norm(delta) <= 1e-14 * (1.0 + sup_norm(x))) {
            res.converged = true;
            break;
        }
    }
    if (res.converged && !res.degenerate) {
        assemble_jacobian(sys, gg, x, J);
        res.degenerate = probe_degenerate(J);
    }
    return res;
}

inline void split_components(const std::vector<double>& x, GridFunction& u, GridFunction& v)
{
    const int n = static_cast<int>(x.size() / 2);
    u = GridFunction(n);
    v = GridFunction(n);
    for (int j = 0; j < n; ++j) {
        u.values[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(2 * j)];
        v.values[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(2 * j + 1)];
    }
    u.rebuild_derivatives();
    v.rebuild_derivatives();
}

inline std::vector<double> interleave(const GridFunction& u, const GridFunction& v)
{
    const int n = u.n();
    std::vector<double> x(static_cast<std::size_t>(2 * n));
    for (int j = 0; j < n; ++j) {
        x[static_cast<std::size_t>(2 * j)] = u.values[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(2 * j + 1)] = v.values[static_cast<std::size_t>(j)];
    }
    return x;
}

// (4 x_fine - x_coarse) / 3 on the fine grid; coarse values are injected at
// even nodes and quintic-interpolated at odd ones
inline GridFunction richardson_combine(const GridFunction& coarse, const GridFunction& fine)
{
    const int nf = fine.n();
    GridFunction out(nf);
    for (int j = 0; j < nf; ++j) {
        double base;
        if (j % 2 == 0)
            base = coarse.values[static_cast<std::size_t>(j / 2)];
        else
            base = coarse.interpolate(static_cast<double>(j) / (nf - 1), 6);
        out.values[static_cast<std::size_t>(j)] =
            (4.0 * fine.values[static_cast<std::size_t>(j)] - base) / 3.0;
    }
    out.rebuild_derivatives();
    return out;
}

} // namespace detail

inline SolutionPair make_solution_pair(const NonlinearSystem& sys, GridFunction u, GridFunction v)
{
    SolutionPair sp;
    sp.residual_sup = integrated_residual(sys, u, v);
    const double c1 = sys.constants(1).c;
    const double c2 = sys.constants(2).c;
    sp.cone_margin_1 = u.min_value() - c1 * u.c1_norm();
    sp.cone_margin_2 = v.min_value() - c2 * v.c1_norm();
    sp.nonconstant = {u.oscillation() > 1e-3, v.oscillation() > 1e-3};
    sp.u = std::move(u);
    sp.v = std::move(v);
    return sp;
}

/*
 * Damped Newton + grid refinement.  With richardson disabled a single
 * collocation solve on opts.grid_n is returned (used by convergence-order
 * studies); otherwise the grid doubles until the integrated residual of
 * the extrapolated pair reaches opts.tol or the grid cap.
 */
inline SolveOutcome newton_solve(const NonlinearSystem& sys,
                                 const std::pair<GridFunction, GridFunction>& seed,
                                 const SolveOptions& opts)
{
    if (opts.grid_n < 65 || opts.grid_n % 2 == 0)
        throw std::invalid_argument("newton_solve: grid_n must be odd and >= 65");
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("newton_solve: tol must be positive");

    SolveOutcome out;
    int n = opts.grid_n;
    detail::GridGeometry gg(sys.geometry(), n);

    GridFunction useed = seed.first.n() == n ? seed.first : seed.first.resampled(n);
    GridFunction vseed = seed.second.n() == n ? seed.second : seed.second.resampled(n);
    std::vector<double> x = detail::interleave(useed, vseed);

    detail::GridNewtonResult gr = detail::newton_on_grid(sys, gg, x, opts);
    if (!gr.converged) {
        out.status = gr.fail_reason == "singular Jacobian" ? SolveStatus::SingularJacobian
                                                           : SolveStatus::NoConvergence;
        out.note = gr.fail_reason;
        return out;
    }
    bool degenerate = gr.degenerate;

    GridFunction uc, vc;
    detail::split_components(x, uc, vc);
    SolutionPair best = make_solution_pair(sys, uc, vc);
    out.finest_grid = n;

    if (best.residual_sup <= opts.tol || !opts.richardson) {
        const bool reached = best.residual_sup <= opts.tol;
        out.pair = std::move(best);
        if (!reached)
            out.status = SolveStatus::ToleranceNotReached;
        else
            out.status = degenerate ? SolveStatus::ConvergedDegenerate : SolveStatus::Converged;
        return out;
    }

    while (2 * n - 1 <= opts.max_grid_n) {
        const int nf = 2 * n - 1;
        detail::GridGeometry ggf(sys.geometry(), nf);

        GridFunction ufs(nf), vfs(nf);
        for (int j = 0; j < nf; ++j) {
            const double tt = static_cast<double>(j) / (nf - 1);
            ufs.values[static_cast<std::size_t>(j)] =
                (j % 2 == 0) ? uc.values[static_cast<std::size_t>(j / 2)] : uc.interpolate(tt, 4);
            vfs.values[static_cast<std::size_t>(j)] =
                (j % 2 == 0) ? vc.values[static_cast<std::size_t>(j / 2)] : vc.interpolate(tt, 4);
        }
        std::vector<double> xf = detail::interleave(ufs, vfs);
        gr = detail::newton_on_grid(sys, ggf, xf, opts);
        if (!gr.converged) {
            out.pair = std::move(best);
            out.status = SolveStatus::ToleranceNotReached;
            out.note = "refinement stopped at N=" + std::to_string(nf) + ": " + gr.fail_reason;
            return out;
        }
        degenerate = degenerate || gr.degenerate;

        GridFunction uf, vf;
        detail::split_components(xf, uf, vf);
        GridFunction uext = detail::richardson_combine(uc, uf);
        GridFunction vext = detail::richardson_combine(vc, vf);
        SolutionPair cand = make_solution_pair(sys, uext, vext);
        out.finest_grid = nf;

        if (cand.residual_sup < best.residual_sup)
            best = cand;
        if (best.residual_sup <= opts.tol) {
            out.pair = std::move(best);
            out.status = degenerate ? SolveStatus::ConvergedDegenerate : SolveStatus::Converged;
            return out;
        }
        uc = std::move(uf);
        vc = std::move(vf);
        n = nf;
    }

    out.pair = std::move(best);
    out.status = SolveStatus::ToleranceNotReached;
    out.note = "residual " + std::to_string(out.pair.residual_sup) + " above tol at grid cap";
    return out;
}

/*
 * Localization regions of the multiplicity theorem, expressed through the
 * boundary descriptions of the sets K_{a,b} (C1-norm caps) and V_{a,b}
 * (minimum caps):
 *
 *   S1 = V_{s1,s2} \ closure(K_{rho1,rho2})
 *   S2 = K_{theta1,theta2} \ closure(V_{s1,s2})
 *   S3 = V_{sigma1,sigma2} \ closure(K_{theta1,theta2})
 *
 * With a two-level ladder only the analogue of S1, K_{s} \ closure(V_rho),
 * is meaningful.
 */
inline Region classify_region(const SolutionPair& sp, const RadiiLadder& ladder)
{
    const double nu = sp.u.c1_norm(), nv = sp.v.c1_norm();
    const double mu = sp.u.min_value(), mv = sp.v.min_value();
    if (sp.u.sup_norm() <= 1e-6 && sp.v.sup_norm() <= 1e-6)
        return Region::Trivial;
    if (mu < -1e-10 || mv < -1e-10)
        return Region::Other; // sign-violating Newton limit
    if (!ladder.is_four_level) {
        if (nu < ladder.s1 && nv < ladder.s2 && (mu > ladder.rho1 || mv > ladder.rho2))
            return Region::S1;
        return Region::Other;
    }
    if (mu < ladder.s1 && mv < ladder.s2 && (nu > ladder.rho1 || nv > ladder.rho2))
        return Region::S1;
    if (nu < ladder.theta1 && nv < ladder.theta2 && (mu > ladder.s1 || mv > ladder.s2))
        return Region::S2;
    if (mu < ladder.sigma1 && mv < ladder.sigma2 && (nu > ladder.theta1 || nv > ladder.theta2))
        return Region::S3;
    return Region::Other;
}

struct SeedOutcome {
    int index = 0;
    const char* target = "";
    double level_u = 0.0, level_v = 0.0;
    SolveStatus status = SolveStatus::NoConvergence;
    std::string note;
    double residual = std::numeric_limits<double>::infinity();
    int finest_grid = 0;
    int solution_index = -1; // index into MultiSolveResult::solutions, -1 if dropped
};

struct MultiSolveResult {
    std::vector<SolutionPair> solutions;
    std::vector<SeedOutcome> seeds;
};

/*
 * Region-seeded multistart.  Constant seeds are placed at the quarter
 * points of each target interval, conditioned by three Picard steps and
 * polished by Newton; converged pairs are deduped by C1 distance and
 * classified.  Deterministic: seeds are fixed and dedup order follows
 * the seed index regardless of thread scheduling.
 */
inline MultiSolveResult multi_solve(const NonlinearSystem& sys, const RadiiLadder& ladder,
                                    const SolveOptions& opts)
{
    struct SeedSpec {
        const char* target;
        double u0, v0;
    };
    std::vector<SeedSpec> specs;
    const double fr[3] = {0.25, 0.5, 0.75};
    auto push_region = [&](const char* name, double lo1, double hi1, double lo2, double hi2) {
        for (double fa : fr)
            for (double fb : fr)
                specs.push_back({name, lo1 + fa * (hi1 - lo1), lo2 + fb * (hi2 - lo2)});
    };

    push_region("S1", ladder.rho1, ladder.s1, ladder.rho2, ladder.s2);
    if (ladder.is_four_level) {
        const double c1 = sys.constants(1).c, c2 = sys.constants(2).c;
        // K_theta \ V_s seeds live in [s/c, c*theta] when that interval is
        // nonempty; otherwise fall back to the plain [s, theta] bracket
        double lo1 = ladder.s1 / c1, hi1 = c1 * ladder.theta1;
        double lo2 = ladder.s2 / c2, hi2 = c2 * ladder.theta2;
        if (!(lo1 < hi1)) { lo1 = ladder.s1; hi1 = ladder.theta1; }
        if (!(lo2 < hi2)) { lo2 = ladder.s2; hi2 = ladder.theta2; }
        push_region("S2", lo1, hi1, lo2, hi2);
        push_region("S3", ladder.theta1, ladder.sigma1, ladder.theta2, ladder.sigma2);
    }

    const int count = static_cast<int>(specs.size());
    std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(count));
    std::vector<std::optional<SolutionPair>> pairs(static_cast<std::size_t>(count));
    std::vector<char> degenerate(static_cast<std::size_t>(count), 0);

    parallel_for(count, opts.threads, [&](int idx) {
        const SeedSpec& sp = specs[static_cast<std::size_t>(idx)];
        SeedOutcome& oc = outcomes[static_cast<std::size_t>(idx)];
        oc.index = idx;
        oc.target = sp.target;
        oc.level_u = sp.u0;
        oc.level_v = sp.v0;
        try {
            const std::pair<GridFunction, GridFunction> raw{
                GridFunction::constant(opts.grid_n, sp.u0),
                GridFunction::constant(opts.grid_n, sp.v0)};
            std::pair<GridFunction, GridFunction> seed = raw;
            // Picard conditions the seed into the cone, but above the
            // largest nonlinearity root it can run away; keep the raw
            // constant when the iterates leave the ladder region
            const double bound =
                4.0 * std::max(1.0, ladder.is_four_level ? std::max(ladder.sigma1, ladder.sigma2)
                                                         : std::max(ladder.s1, ladder.s2));
            try {
                seed = picard_refine(sys, std::move(seed), 3);
                if (std::max(seed.first.c1_norm(), seed.second.c1_norm()) > bound)
                    seed = raw;
            } catch (const PicardDivergence&) {
                seed = raw;
            }
            SolveOutcome so = newton_solve(sys, seed, opts);
            oc.status = so.status;
            oc.note = so.note;
            oc.finest_grid = so.finest_grid;
            if (so.usable()) {
                oc.residual = so.pair.residual_sup;
                degenerate[static_cast<std::size_t>(idx)] =
                    so.status == SolveStatus::ConvergedDegenerate ? 1 : 0;
                pairs[static_cast<std::size_t>(idx)] = std::move(so.pair);
            }
        } catch (const std::exception& e) {
            oc.status = SolveStatus::NoConvergence;
            oc.note = e.what();
        }
    });

    MultiSolveResult result;
    for (int idx = 0; idx < count; ++idx) {
        auto& cand = pairs[static_cast<std::size_t>(idx)];
        SeedOutcome& oc = outcomes[static_cast<std::size_t>(idx)];
        if (!cand) {
            result.seeds.push_back(oc);
            continue;
        }
        bool duplicate = false;
        for (std::size_t k = 0; k < result.solutions.size(); ++k) {
            SolutionPair& kept = result.solutions[k];
            const double scale = 1.0 + std::max(std::max(kept.u.c1_norm(), kept.v.c1_norm()),
                                                std::max(cand->u.c1_norm(), cand->v.c1_norm()));
            const double dist = std::max(c1_distance(kept.u, cand->u),
                                         c1_distance(kept.v, cand->v));
            if (dist <= 1e-6 * scale) {
                duplicate = true;
                if (cand->residual_sup < kept.residual_sup) {
                    const Region reg = kept.region;
                    kept = std::move(*cand);
                    kept.region = reg;
                }
                oc.solution_index = static_cast<int>(k);
                break;
            }
        }
        if (!duplicate) {
            // a singular Jacobian means the fixed point is not isolated
            // (f == 0 makes every constant a solution); keep but sideline
            cand->region = degenerate[static_cast<std::size_t>(idx)]
                               ? Region::Other
                               : classify_region(*cand, ladder);
            oc.solution_index = static_cast<int>(result.solutions.size());
            result.solutions.push_back(std::move(*cand));
        }
        result.seeds.push_back(oc);
    }
    return result;
}

// nontrivial solutions = converged, deduped, not the zero pair, sign-clean
inline int count_nontrivial(const MultiSolveResult& r)
{
    int c = 0;
    for (const SolutionPair& sp : r.solutions)
        if (sp.region != Region::Trivial && sp.region != Region::Other)
            ++c;
    return c;
}

} // namespace annulus

#endif
