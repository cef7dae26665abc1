#ifndef ANNULUS_LINBAND_HPP
#define ANNULUS_LINBAND_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace annulus {

/*
 * Banded LU with partial pivoting, LAPACK band layout: entry (i,j) lives
 * at row (kl + ku + i - j) of column j; the top kl rows absorb pivoting
 * fill.  Sized for the collocation Jacobians (kl = ku = 4), but general.
 */
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), kv_(kl + ku), ldab_(2 * kl + ku + 1),
          ab_(static_cast<std::size_t>(ldab_) * n_, 0.0), piv_(n_, 0)
    {
        if (n < 1 || kl < 0 || ku < 0)
            throw std::invalid_argument("BandMatrix: bad dimensions");
    }

    int size() const { return n_; }

    double& at(int i, int j)
    {
        const int r = kv_ + i - j;
        if (j < 0 || j >= n_ || r < kl_ || r >= ldab_)
            throw std::out_of_range("BandMatrix: entry outside band");
        return ab_[static_cast<std::size_t>(j) * ldab_ + r];
    }

    double get(int i, int j) const
    {
        const int r = kv_ + i - j;
        if (j < 0 || j >= n_ || r < 0 || r >= ldab_)
            return 0.0;
        return ab_[static_cast<std::size_t>(j) * ldab_ + r];
    }

    void clear() { std::fill(ab_.begin(), ab_.end(), 0.0); }

    // y = A x using the original band (call before factor())
    std::vector<double> apply(const std::vector<double>& x) const
    {
        std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j) {
            const int ilo = std::max(0, j - ku_);
            const int ihi = std::min(n_ - 1, j + kl_);
            for (int i = ilo; i <= ihi; ++i)
                y[static_cast<std::size_t>(i)] +=
                    ab_[static_cast<std::size_t>(j) * ldab_ + (kv_ + i - j)] *
                    x[static_cast<std::size_t>(j)];
        }
        return y;
    }

    // in-place LU; returns false when an exactly zero pivot is met
    bool factor()
    {
        factored_ = true;
        min_pivot_ = std::numeric_limits<double>::infinity();
        max_abs_ = 0.0;
        for (double v : ab_)
            max_abs_ = std::max(max_abs_, std::abs(v));

        for (int j = 0; j < n_; ++j) {
            const int km = std::min(kl_, n_ - 1 - j);
            // pivot search in column j
            int jp = 0;
            double best = std::abs(col(j, kv_));
            for (int i = 1; i <= km; ++i) {
                const double a = std::abs(col(j, kv_ + i));
                if (a > best) {
                    best = a;
                    jp = i;
                }
            }
            piv_[static_cast<std::size_t>(j)] = j + jp;
            min_pivot_ = std::min(min_pivot_, best);
            if (best == 0.0)
                return false;
            const int jcmax = std::min(j + kv_, n_ - 1);
            if (jp != 0)
                for (int c = j; c <= jcmax; ++c)
                    std::swap(colref(c, kv_ + j - c), colref(c, kv_ + j + jp - c));
            const double pivot = col(j, kv_);
            for (int i = 1; i <= km; ++i)
                colref(j, kv_ + i) /= pivot;
            for (int c = j + 1; c <= jcmax; ++c) {
                const double f = col(c, kv_ + j - c);
                if (f != 0.0)
                    for (int i = 1; i <= km; ++i)
                        colref(c, kv_ + j + i - c) -= col(j, kv_ + i) * f;
            }
        }
        return true;
    }

    // solve A x = b with the factor in place
    void solve(std::vector<double>& b) const
    {
        if (!factored_)
            throw std::logic_error("BandMatrix: solve before factor");
        for (int j = 0; j < n_ - 1; ++j) {
            const int jp = piv_[static_cast<std::size_t>(j)];
            if (jp != j)
                std::swap(b[static_cast<std::size_t>(j)], b[static_cast<std::size_t>(jp)]);
            const int km = std::min(kl_, n_ - 1 - j);
            for (int i = 1; i <= km; ++i)
                b[static_cast<std::size_t>(j + i)] -= col(j, kv_ + i) * b[static_cast<std::size_t>(j)];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            b[static_cast<std::size_t>(j)] /= col(j, kv_);
            const int ilo = std::max(0, j - kv_);
            for (int i = ilo; i < j; ++i)
                b[static_cast<std::size_t>(i)] -= col(j, kv_ + i - j) * b[static_cast<std::size_t>(j)];
        }
    }

    double min_pivot() const { return min_pivot_; }
    double max_abs() const { return max_abs_; }

private:
    double col(int j, int r) const { return ab_[static_cast<std::size_t>(j) * ldab_ + r]; }
    double& colref(int j, int r) { return ab_[static_cast<std::size_t>(j) * ldab_ + r]; }

    int n_, kl_, ku_, kv_, ldab_;
    std::vector<double> ab_;
    std::vector<int> piv_;
    bool factored_ = false;
    double min_pivot_ = 0.0;
    double max_abs_ = 0.0;
};

} // namespace annulus

#endif
