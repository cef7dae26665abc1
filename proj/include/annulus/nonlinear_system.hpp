#ifndef ANNULUS_NONLINEAR_SYSTEM_HPP
#define ANNULUS_NONLINEAR_SYSTEM_HPP

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "annulus/expr.hpp"
#include "annulus/green_kernel.hpp"
#include "annulus/radial_geometry.hpp"

namespace annulus {

/*
 * The pair of nonlinearities f_1, f_2 together with the shifts and the
 * geometry.  On the unit interval the transformed right-hand sides are
 *
 *   g_i(t,u,v,p,q) = d(t) f_i(r(t), u, v, p/|r'(t)|, q/|r'(t)|)
 *                    + omega_i^2 * (u if i==1 else v),
 *
 * which are non-negative whenever the lower bound
 *
 *   f_i(r,u,v,gu,gv) >= -omega_i^2 * (u if i==1 else v) / sup d      (H)
 *
 * holds.  check_h samples (H) on a bounded box; it is a falsification
 * device, not a proof.
 */
class NonlinearSystem {
public:
    NonlinearSystem(Expr f1, Expr f2, double omega1, double omega2,
                    AnnulusGeometry geom)
        : f_{std::move(f1), std::move(f2)},
          omega_{omega1, omega2},
          kernel_{ShiftedKernel(omega1), ShiftedKernel(omega2)},
          geom_(geom)
    {
        auto ext = geom_.d_extrema();
        inf_d_ = ext.first;
        sup_d_ = ext.second;
    }

    const Expr& f(int i) const { return f_[check_i(i)]; }
    double omega(int i) const { return omega_[check_i(i)]; }
    const ShiftedKernel& kernel(int i) const { return kernel_[check_i(i)]; }
    KernelConstants constants(int i) const { return kernel_[check_i(i)].constants(); }
    const AnnulusGeometry& geometry() const { return geom_; }
    double inf_d() const { return inf_d_; }
    double sup_d() const { return sup_d_; }

    double eval_f(int i, double r, double u, double v, double gu, double gv) const
    {
        return f_[check_i(i)].eval(r, u, v, gu, gv);
    }

    double eval_g(int i, double t, double u, double v, double p, double q) const
    {
        const int ix = check_i(i);
        const double rp = std::abs(geom_.rprime_of_t(t));
        const double fv = f_[ix].eval(geom_.r_of_t(t), u, v, p / rp, q / rp);
        const double w2 = omega_[ix] * omega_[ix];
        return geom_.d_of_t(t) * fv + w2 * (ix == 0 ? u : v);
    }

private:
    static int check_i(int i)
    {
        if (i != 1 && i != 2)
            throw std::invalid_argument("component index must be 1 or 2");
        return i - 1;
    }

    std::array<Expr, 2> f_;
    std::array<double, 2> omega_;
    std::array<ShiftedKernel, 2> kernel_;
    AnnulusGeometry geom_;
    double inf_d_, sup_d_;
};

struct HCheckReport {
    bool pass = false;
    double worst_margin = 0.0;          // min over samples of f_i + omega_i^2 z_i / sup d
    std::array<double, 5> witness{};    // (r, u, v, gu, gv) attaining the worst margin
    int component = 1;
    double z_bound = 0.0;
    long samples = 0;
};

// sample condition (H) on [R0,R1] x [0,z_bound]^4, density points per axis
inline HCheckReport check_H(const NonlinearSystem& sys, int density, double z_bound)
{
    if (density < 2)
        throw std::invalid_argument("check_H: sample density must be >= 2");
    if (!(z_bound > 0.0))
        throw std::invalid_argument("check_H: z bound must be positive");

    HCheckReport rep;
    rep.z_bound = z_bound;
    rep.worst_margin = std::numeric_limits<double>::infinity();

    const AnnulusGeometry& geom = sys.geometry();
    std::vector<double> raxis(density), zaxis(density);
    for (int j = 0; j < density; ++j) {
        const double a = static_cast<double>(j) / (density - 1);
        raxis[j] = geom.r0() + a * (geom.r1() - geom.r0());
        zaxis[j] = a * z_bound;
    }

    for (int i = 1; i <= 2; ++i) {
        const double w2 = sys.omega(i) * sys.omega(i);
        for (double r : raxis)
            for (double u : zaxis)
                for (double v : zaxis)
                    for (double gu : zaxis)
                        for (double gv : zaxis) {
                            double fv;
                            try {
                                fv = sys.eval_f(i, r, u, v, gu, gv);
                            } catch (const EvalError& e) {
                                throw EvalError(std::string(e.what()) + " while sampling (H) at r=" +
                                                std::to_string(r) + " u=" + std::to_string(u) +
                                                " v=" + std::to_string(v) + " gu=" + std::to_string(gu) +
                                                " gv=" + std::to_string(gv));
                            }
                            const double zi = (i == 1) ? u : v;
                            const double margin = fv + w2 * zi / sys.sup_d();
                            ++rep.samples;
                            if (margin < rep.worst_margin) {
                                rep.worst_margin = margin;
                                rep.witness = {r, u, v, gu, gv};
                                rep.component = i;
                            }
                        }
    }
    rep.pass = rep.worst_margin >= 0.0;
    return rep;
}

} // namespace annulus

#endif
