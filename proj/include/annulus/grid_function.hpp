#ifndef ANNULUS_GRID_FUNCTION_HPP
#define ANNULUS_GRID_FUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace annulus {

/*
 * A function on the uniform grid t_j = j/(N-1) carrying both nodal values
 * and nodal derivative values.  The C^1 norm is max(||w||_inf, ||w'||_inf).
 * Derivative fields are rebuilt from the values by 4th-order finite
 * differences after every solve.
 */
struct GridFunction {
    std::vector<double> values;
    std::vector<double> derivs;

    GridFunction() = default;
    explicit GridFunction(int n) : values(static_cast<std::size_t>(n), 0.0),
                                   derivs(static_cast<std::size_t>(n), 0.0)
    {
        if (n < 5)
            throw std::invalid_argument("GridFunction: need at least 5 nodes");
    }

    static GridFunction constant(int n, double value)
    {
        GridFunction g(n);
        std::fill(g.values.begin(), g.values.end(), value);
        return g;
    }

    int n() const { return static_cast<int>(values.size()); }
    double h() const { return 1.0 / (n() - 1); }
    double t(int j) const { return static_cast<double>(j) / (n() - 1); }

    double sup_norm() const
    {
        double m = 0.0;
        for (double v : values)
            m = std::max(m, std::abs(v));
        return m;
    }
    double deriv_sup_norm() const
    {
        double m = 0.0;
        for (double v : derivs)
            m = std::max(m, std::abs(v));
        return m;
    }
    double c1_norm() const { return std::max(sup_norm(), deriv_sup_norm()); }
    double min_value() const { return *std::min_element(values.begin(), values.end()); }
    double max_value() const { return *std::max_element(values.begin(), values.end()); }
    double oscillation() const { return max_value() - min_value(); }

    void rebuild_derivatives()
    {
        derivs = fd_first_derivative(values, h());
    }

    // 5-point 4th-order first derivative on a uniform grid
    static std::vector<double> fd_first_derivative(const std::vector<double>& f, double h)
    {
        const int n = static_cast<int>(f.size());
        std::vector<double> d(f.size());
        const double s = 1.0 / (12.0 * h);
        auto F = [&f](int j) { return f[static_cast<std::size_t>(j)]; };
        d[0] = s * (-25.0 * F(0) + 48.0 * F(1) - 36.0 * F(2) + 16.0 * F(3) - 3.0 * F(4));
        d[1] = s * (-3.0 * F(0) - 10.0 * F(1) + 18.0 * F(2) - 6.0 * F(3) + F(4));
        for (int j = 2; j < n - 2; ++j)
            d[static_cast<std::size_t>(j)] =
                s * (F(j - 2) - 8.0 * F(j - 1) + 8.0 * F(j + 1) - F(j + 2));
        d[static_cast<std::size_t>(n - 2)] =
            -s * (-3.0 * F(n - 1) - 10.0 * F(n - 2) + 18.0 * F(n - 3) - 6.0 * F(n - 4) + F(n - 5));
        d[static_cast<std::size_t>(n - 1)] =
            -s * (-25.0 * F(n - 1) + 48.0 * F(n - 2) - 36.0 * F(n - 3) + 16.0 * F(n - 4) - 3.0 * F(n - 5));
        return d;
    }

    /*
     * 4th-order second derivative, evaluated through neighbour differences
     * so that near-cancellation of large nodal values does not poison the
     * result.  Interior nodes use the centred 5-point stencil written as
     * second differences; the two nodes at each end use 6-point one-sided
     * stencils (offsets {0..5} resp. {-1..4}), applied to differences
     * from the evaluation node since their weights sum to zero.
     */
    static std::vector<double> fd_second_derivative(const std::vector<double>& f, double h)
    {
        const int n = static_cast<int>(f.size());
        if (n < 6)
            throw std::invalid_argument("fd_second_derivative: need at least 6 nodes");
        std::vector<double> d(f.size());
        const double h2 = h * h;
        auto F = [&f](int j) { return f[static_cast<std::size_t>(j)]; };
        auto d2 = [&](int j) { return (F(j + 1) - F(j)) - (F(j) - F(j - 1)); };
        for (int j = 2; j < n - 2; ++j) {
            const double dd = d2(j);
            const double d4 = d2(j + 1) - 2.0 * dd + d2(j - 1);
            d[static_cast<std::size_t>(j)] = (dd - d4 / 12.0) / h2;
        }
        // offsets {1..5} relative to the edge node
        static const double edge[5] = {-77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0};
        auto at_edge = [&](int origin, int dir) {
            double acc = 0.0;
            for (int k = 1; k <= 5; ++k)
                acc += edge[k - 1] * (F(origin + dir * k) - F(origin));
            return acc / h2;
        };
        // offsets {-1, 1, 2, 3, 4} relative to the second node in
        static const double inset[5] = {10.0 / 12.0, -4.0 / 12.0, 14.0 / 12.0,
                                        -6.0 / 12.0, 1.0 / 12.0};
        auto near_edge = [&](int origin, int dir) {
            double acc = inset[0] * (F(origin - dir) - F(origin));
            for (int k = 1; k <= 4; ++k)
                acc += inset[k] * (F(origin + dir * k) - F(origin));
            return acc / h2;
        };
        d[0] = at_edge(0, +1);
        d[1] = near_edge(1, +1);
        d[static_cast<std::size_t>(n - 2)] = near_edge(n - 2, -1);
        d[static_cast<std::size_t>(n - 1)] = at_edge(n - 1, -1);
        return d;
    }

    // piecewise-Lagrange resampling to m nodes (4-point cubic stencils)
    GridFunction resampled(int m) const
    {
        GridFunction out(m);
        for (int j = 0; j < m; ++j)
            out.values[static_cast<std::size_t>(j)] =
                interpolate(static_cast<double>(j) / (m - 1), 4);
        out.rebuild_derivatives();
        return out;
    }

    // Lagrange interpolation of the values at x in [0,1]; order 4 or 6 points
    double interpolate(double x, int points) const
    {
        const int nn = n();
        const double hh = h();
        int cell = static_cast<int>(std::floor(x / hh));
        cell = std::clamp(cell, 0, nn - 2);
        int start = std::clamp(cell - (points / 2 - 1), 0, nn - points);
        double acc = 0.0;
        for (int a = 0; a < points; ++a) {
            double basis = 1.0;
            const double xa = static_cast<double>(start + a) * hh;
            for (int b = 0; b < points; ++b) {
                if (a == b)
                    continue;
                const double xb = static_cast<double>(start + b) * hh;
                basis *= (x - xb) / (xa - xb);
            }
            acc += basis * values[static_cast<std::size_t>(start + a)];
        }
        return acc;
    }
};

// C1 distance evaluated on the common nested subgrid (or via resampling)
inline double c1_distance(const GridFunction& a, const GridFunction& b)
{
    const GridFunction* fine = &a;
    const GridFunction* coarse = &b;
    if (fine->n() < coarse->n())
        std::swap(fine, coarse);
    const int cn = coarse->n();
    const int fn = fine->n();
    if ((fn - 1) % (cn - 1) == 0) {
        const int stride = (fn - 1) / (cn - 1);
        double m = 0.0;
        for (int j = 0; j < cn; ++j) {
            const std::size_t fj = static_cast<std::size_t>(j) * static_cast<std::size_t>(stride);
            m = std::max(m, std::abs(coarse->values[static_cast<std::size_t>(j)] - fine->values[fj]));
            m = std::max(m, std::abs(coarse->derivs[static_cast<std::size_t>(j)] - fine->derivs[fj]));
        }
        return m;
    }
    GridFunction rb = fine->resampled(cn);
    double m = 0.0;
    for (int j = 0; j < cn; ++j) {
        m = std::max(m, std::abs(coarse->values[static_cast<std::size_t>(j)] - rb.values[static_cast<std::size_t>(j)]));
        m = std::max(m, std::abs(coarse->derivs[static_cast<std::size_t>(j)] - rb.derivs[static_cast<std::size_t>(j)]));
    }
    return m;
}

} // namespace annulus

#endif
