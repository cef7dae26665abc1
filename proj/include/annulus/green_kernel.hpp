#ifndef ANNULUS_GREEN_KERNEL_HPP
#define ANNULUS_GREEN_KERNEL_HPP

#include <cmath>
#include <stdexcept>

namespace annulus {

/*
 * Green's kernel of  -w'' + omega^2 w = g,  w'(0) = w'(1) = 0:
 *
 *                1          { cosh(omega(1-t)) cosh(omega s),  s <= t
 *   k(t,s) = ---------- *   {
 *            omega sinh     { cosh(omega(1-s)) cosh(omega t),  t <= s
 *             (omega)
 *
 * together with its a.e. t-derivative, the diagonal envelope
 * phi(s) = k(s,s) and the constants
 *
 *   m = M = omega^2,
 *   m* = omega sinh(omega) / (2 sinh^2(omega/2)),
 *   c_k = 1/cosh(omega),            c = c_k min{1, 1/omega}.
 *
 * Everything is evaluated through exp of non-positive arguments so that
 * no intermediate overflows; shifts beyond omega = 50 are rejected since
 * the kernel is numerically a spike there anyway.
 */
struct KernelConstants {
    double m;      // (sup_t int k)^-1
    double big_m;  // (inf_t int k)^-1, equals m
    double m_star; // (sup_t int |dk/dt|)^-1
    double c_k;    // min k/phi = 1/cosh(omega)
    double c;      // cone constant c_k * min{1, 1/omega}
};

class ShiftedKernel {
public:
    explicit ShiftedKernel(double omega) : omega_(omega)
    {
        if (!(omega > 0.0))
            throw std::invalid_argument("ShiftedKernel: omega must be positive");
        if (omega > 50.0)
            throw std::invalid_argument("ShiftedKernel: omega > 50 is numerically degenerate");
        sinh_omega_ = std::sinh(omega);
        cosh_omega_ = std::cosh(omega);
        one_minus_em2_ = 1.0 - std::exp(-2.0 * omega);
    }

    double omega() const { return omega_; }
    double sinh_omega() const { return sinh_omega_; }
    double cosh_omega() const { return cosh_omega_; }

    double k(double t, double s) const
    {
        check_ts(t, s);
        // symmetric: evaluate the s <= t branch with arguments swapped if needed
        const double lo = std::min(s, t);
        const double hi = std::max(s, t);
        // cosh(omega(1-hi)) cosh(omega lo) / (omega sinh omega), balanced
        const double a = omega_ * (1.0 - hi);
        const double b = omega_ * lo;
        const double c = omega_;
        const double num = std::exp(a + b - c) + std::exp(a - b - c) +
                           std::exp(b - a - c) + std::exp(-a - b - c);
        return num / (2.0 * omega_ * one_minus_em2_);
    }

    // dk/dt; on the line t = s the s > t branch limit is returned
    double dk_dt(double t, double s) const
    {
        check_ts(t, s);
        if (s < t) {
            // -cosh(omega s) sinh(omega(1-t)) / sinh(omega)
            return -sinh_cosh_over_sinh(omega_ * (1.0 - t), omega_ * s);
        }
        // +cosh(omega(1-s)) sinh(omega t) / sinh(omega)
        return sinh_cosh_over_sinh(omega_ * t, omega_ * (1.0 - s));
    }

    // phi(s) = sup_t k(t,s) = k(s,s)
    double phi(double s) const { return k(s, s); }

    KernelConstants constants() const
    {
        const double sh = std::sinh(0.5 * omega_);
        KernelConstants kc;
        kc.m = omega_ * omega_;
        kc.big_m = kc.m;
        kc.m_star = omega_ * sinh_omega_ / (2.0 * sh * sh);
        kc.c_k = 1.0 / cosh_omega_;
        kc.c = kc.c_k * std::min(1.0, 1.0 / omega_);
        return kc;
    }

    // int_0^1 k(t,s) ds via the split antiderivative; identically 1/omega^2
    double row_integral(double t) const
    {
        check_t(t);
        const double left = std::cosh(omega_ * (1.0 - t)) * std::sinh(omega_ * t);
        const double right = std::cosh(omega_ * t) * std::sinh(omega_ * (1.0 - t));
        return (left + right) / (omega_ * omega_ * sinh_omega_);
    }

    // int_0^1 |dk/dt|(t,s) ds = 2 sinh(omega t) sinh(omega(1-t)) / (omega sinh omega)
    double abs_deriv_row_integral(double t) const
    {
        check_t(t);
        return 2.0 * std::sinh(omega_ * t) * std::sinh(omega_ * (1.0 - t)) /
               (omega_ * sinh_omega_);
    }

private:
    // sinh(a) cosh(b) / sinh(omega) with a, b >= 0, a + b <= omega
    double sinh_cosh_over_sinh(double a, double b) const
    {
        const double c = omega_;
        const double num = std::exp(a + b - c) + std::exp(a - b - c) -
                           std::exp(b - a - c) - std::exp(-a - b - c);
        return num / (2.0 * one_minus_em2_);
    }

    static void check_t(double t)
    {
        if (!(t >= 0.0 && t <= 1.0))
            throw std::domain_error("ShiftedKernel: t outside [0,1]");
    }
    static void check_ts(double t, double s)
    {
        if (!(t >= 0.0 && t <= 1.0) || !(s >= 0.0 && s <= 1.0))
            throw std::domain_error("ShiftedKernel: (t,s) outside the unit square");
    }

    double omega_;
    double sinh_omega_;
    double cosh_omega_;
    double one_minus_em2_;
};

} // namespace annulus

#endif
