#ifndef ANNULUS_RADIAL_GEOMETRY_HPP
#define ANNULUS_RADIAL_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace annulus {

/*
 * Change of variables between the annulus R0 < |x| < R1 in R^n and the
 * unit interval.  Radial profiles w(r) become functions w(t) on [0,1] via
 *
 *   r(t) = R1^(1-t) R0^t                    (n = 2)
 *   r(t) = (A/(B-t))^(1/(n-2)),             (n >= 3)
 *          A = (R0 R1)^(n-2) / (R1^(n-2) - R0^(n-2)),
 *          B = R1^(n-2) / (R1^(n-2) - R0^(n-2)),
 *
 * which removes the first-order term of the radial Laplacian and leaves
 *
 *   -w''(t) = d(t) f(r(t), w(t), |w'(t)/r'(t)|),   d(t) = r'(t)^2.
 *
 * Both r and |r'| are monotone in t, so all extrema used downstream are
 * endpoint evaluations of closed forms.
 */
class AnnulusGeometry {
public:
    AnnulusGeometry(int n, double r0, double r1)
        : n_(n), r0_(r0), r1_(r1)
    {
        if (n < 2)
            throw std::invalid_argument("AnnulusGeometry: dimension must be >= 2");
        if (!(r0 > 0.0) || !(r1 > r0) || !std::isfinite(r1))
            throw std::invalid_argument("AnnulusGeometry: need 0 < r0 < r1 < inf");
        if (r1 - r0 < 1e-9 * r0)
            throw std::invalid_argument("AnnulusGeometry: annulus too thin, transform ill-conditioned");
        log_ratio_ = std::log(r1 / r0);
        if (n >= 3) {
            const double p = static_cast<double>(n - 2);
            const double r0p = std::pow(r0, p);
            const double r1p = std::pow(r1, p);
            gap_ = r1p - r0p;
            a_ = r0p * r1p / gap_;
            b_ = r1p / gap_;
        } else {
            gap_ = 0.0;
            a_ = 0.0;
            b_ = 0.0;
        }
    }

    int dimension() const { return n_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }

    double r_of_t(double t) const
    {
        check_t(t);
        if (n_ == 2)
            return r1_ * std::exp(-t * log_ratio_);
        return std::pow(a_ / (b_ - t), 1.0 / (n_ - 2.0));
    }

    // signed dr/dt; never zero on [0,1]
    double rprime_of_t(double t) const
    {
        check_t(t);
        if (n_ == 2)
            return -log_ratio_ * r_of_t(t);
        return r_of_t(t) / ((n_ - 2.0) * (b_ - t));
    }

    // d^2 r/dt^2, used when transforming residuals back to the r variable
    double rsecond_of_t(double t) const
    {
        check_t(t);
        if (n_ == 2)
            return log_ratio_ * log_ratio_ * r_of_t(t);
        const double q = (n_ - 2.0) * (b_ - t);
        return r_of_t(t) * (n_ - 1.0) / (q * q);
    }

    // weight d(t) of the transformed equation, strictly positive
    double d_of_t(double t) const
    {
        check_t(t);
        if (n_ == 2) {
            const double r = r_of_t(t);
            return r * r * log_ratio_ * log_ratio_;
        }
        const double p = static_cast<double>(n_ - 2);
        const double num = r0_ * r1_ * gap_ / p;
        const double r1p = std::pow(r1_, p);
        return num * num / std::pow(r1p - gap_ * t, 2.0 * (n_ - 1.0) / p);
    }

    // exact extrema of the monotone weight
    std::pair<double, double> d_extrema() const
    {
        const double d0 = d_of_t(0.0);
        const double d1 = d_of_t(1.0);
        return {std::min(d0, d1), std::max(d0, d1)};
    }

    // alpha = inf_{t in [0,1]} |r'(t)|; |r'| is monotone, so endpoints suffice
    double alpha() const
    {
        return std::min(std::abs(rprime_of_t(0.0)), std::abs(rprime_of_t(1.0)));
    }

private:
    static void check_t(double t)
    {
        if (!(t >= 0.0 && t <= 1.0))
            throw std::domain_error("AnnulusGeometry: t outside [0,1]");
    }

    int n_;
    double r0_, r1_;
    double log_ratio_;
    double a_, b_, gap_;
};

} // namespace annulus

#endif
