#ifndef ANNULUS_QUADRATURE_HPP
#define ANNULUS_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace annulus {

/*
 * Gauss-Legendre rules on [-1,1], computed once per order by Newton
 * iteration on P_n (initial guesses from the Chebyshev-like asymptotic
 * formula).  Nodes are symmetrized so the rule is exactly symmetric.
 */
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n)
    {
        if (n < 1 || n > 512)
            throw std::invalid_argument("GaussLegendre: order out of range");
        nodes.resize(n);
        weights.resize(n);
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            // root of P_n near cos(pi*(i+0.75)/(n+0.5))
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // evaluate P_n(x) and P_n'(x) by upward recurrence
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15)
                    break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if (n % 2 == 1) {
            nodes[n / 2] = 0.0;
        }
    }

    // cached rules; map nodes are stable so references stay valid, the
    // lock only guards the lookup (solver threads share the cache)
    static const GaussLegendre& get(int n)
    {
        static std::mutex mtx;
        static std::map<int, GaussLegendre> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, GaussLegendre(n)).first;
        return it->second;
    }

    // integral of f over [a,b] with this rule
    template <class F>
    double integrate(F&& f, double a, double b) const
    {
        const double mid = 0.5 * (a + b);
        const double hal = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q)
            acc += weights[q] * f(mid + hal * nodes[q]);
        return acc * hal;
    }
};

// convenience: single-panel Gauss-Legendre integral
template <class F>
double gauss_integrate(F&& f, double a, double b, int n = 64)
{
    return GaussLegendre::get(n).integrate(f, a, b);
}

} // namespace annulus

#endif
