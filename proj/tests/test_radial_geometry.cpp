#include <doctest.h>

#include <cmath>
#include <random>

#include "annulus/radial_geometry.hpp"

using annulus::AnnulusGeometry;

TEST_CASE("r_of_t endpoint and midpoint values")
{
    AnnulusGeometry g2(2, 1.0, M_E);
    CHECK(g2.r_of_t(0.0) == doctest::Approx(M_E).epsilon(1e-14));
    CHECK(g2.r_of_t(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g2.r_of_t(0.5) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));

    AnnulusGeometry g3(3, 1.0, 2.0);
    // A = 2, B = 2 for these radii
    CHECK(g3.r_of_t(1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g3.r_of_t(0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rprime closed forms")
{
    AnnulusGeometry g2(2, 1.0, M_E);
    CHECK(g2.rprime_of_t(1.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(g2.rprime_of_t(0.0) == doctest::Approx(-M_E).epsilon(1e-14));

    AnnulusGeometry g3(3, 1.0, 2.0);
    CHECK(g3.rprime_of_t(0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("weight d values and extrema")
{
    AnnulusGeometry g2(2, 1.0, M_E);
    CHECK(g2.d_of_t(0.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(g2.d_of_t(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    auto [lo2, hi2] = g2.d_extrema();
    CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hi2 == doctest::Approx(std::exp(2.0)).epsilon(1e-14));

    AnnulusGeometry g3(3, 1.0, 2.0);
    CHECK(g3.d_of_t(0.0) == doctest::Approx(0.25).epsilon(1e-14));
    auto [lo3, hi3] = g3.d_extrema();
    CHECK(lo3 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(hi3 == doctest::Approx(4.0).epsilon(1e-14));

    AnnulusGeometry thin(2, 1.0, 1.0001);
    auto [lot, hit] = thin.d_extrema();
    CHECK(lot > 0.0);
    CHECK(lot < hit);
    CHECK(hit == doctest::Approx(1.0001 * 1.0001 * std::pow(std::log(1.0001), 2)).epsilon(1e-12));
}

TEST_CASE("alpha closed forms")
{
    CHECK(AnnulusGeometry(2, 1.0, M_E).alpha() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(AnnulusGeometry(2, 1.0, M_E * M_E).alpha() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(AnnulusGeometry(3, 1.0, 2.0).alpha() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("construction rejects bad geometries and domains")
{
    CHECK_THROWS_AS(AnnulusGeometry(1, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(AnnulusGeometry(2, 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(AnnulusGeometry(2, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(AnnulusGeometry(2, 1.0, 1.0 + 1e-12), std::invalid_argument);
    AnnulusGeometry g(2, 1.0, 2.0);
    CHECK_THROWS_AS(g.r_of_t(-0.001), std::domain_error);
    CHECK_THROWS_AS(g.r_of_t(1.001), std::domain_error);
    CHECK_THROWS_AS(g.d_of_t(2.0), std::domain_error);
}

TEST_CASE("bijection: r strictly monotone with endpoint set {r0,r1}")
{
    std::mt19937 rng(7001);
    std::uniform_real_distribution<double> ur(0.1, 5.0);
    std::uniform_int_distribution<int> un(2, 7);
    for (int rep = 0; rep < 50; ++rep) {
        const double r0 = ur(rng);
        const double r1 = r0 + ur(rng);
        AnnulusGeometry g(un(rng), r0, r1);
        const double lo = std::min(g.r_of_t(0.0), g.r_of_t(1.0));
        const double hi = std::max(g.r_of_t(0.0), g.r_of_t(1.0));
        CHECK(lo == doctest::Approx(r0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(r1).epsilon(1e-12));
        double prev = g.r_of_t(0.0);
        const double dir = g.rprime_of_t(0.5) > 0 ? 1.0 : -1.0;
        for (int k = 1; k <= 64; ++k) {
            const double cur = g.r_of_t(k / 64.0);
            CHECK(dir * (cur - prev) > 0.0);
            prev = cur;
        }
    }
}

TEST_CASE("derivative consistency against central differences")
{
    // moderate shells: extreme radius ratios blow up the higher
    // t-derivatives and the O(h^2) difference error with them
    std::mt19937 rng(7002);
    std::uniform_real_distribution<double> ur(0.5, 2.0), ratio(1.3, 2.5), ut(0.05, 0.95);
    std::uniform_int_distribution<int> un(2, 5);
    const double h = 1e-4;
    for (int rep = 0; rep < 200; ++rep) {
        const double r0 = ur(rng);
        AnnulusGeometry g(un(rng), r0, r0 * ratio(rng));
        const double t = ut(rng);
        const double fd = (g.r_of_t(t + h) - g.r_of_t(t - h)) / (2.0 * h);
        CHECK(g.rprime_of_t(t) == doctest::Approx(fd).epsilon(1e-6));
        const double fd2 = (g.r_of_t(t + h) - 2.0 * g.r_of_t(t) + g.r_of_t(t - h)) / (h * h);
        CHECK(g.rsecond_of_t(t) == doctest::Approx(fd2).epsilon(1e-5));
    }
}

TEST_CASE("weight identity d = (r')^2 on 1000 random samples")
{
    std::mt19937 rng(7003);
    std::uniform_real_distribution<double> ur(0.1, 8.0), ut(0.0, 1.0);
    const int dims[4] = {2, 3, 4, 7};
    for (int rep = 0; rep < 1000; ++rep) {
        const double r0 = ur(rng);
        AnnulusGeometry g(dims[rep % 4], r0, r0 + ur(rng));
        const double t = ut(rng);
        const double rp = g.rprime_of_t(t);
        CHECK(g.d_of_t(t) == doctest::Approx(rp * rp).epsilon(1e-12));
    }
}

TEST_CASE("d extrema equal the dense-sampling extrema (monotone closed form)")
{
    std::mt19937 rng(7005);
    std::uniform_real_distribution<double> ur(0.2, 4.0);
    std::uniform_int_distribution<int> un(2, 7);
    for (int rep = 0; rep < 20; ++rep) {
        const double r0 = ur(rng);
        AnnulusGeometry g(un(rng), r0, r0 + ur(rng));
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int k = 0; k <= 2000; ++k) {
            const double d = g.d_of_t(k / 2000.0);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        const auto ext = g.d_extrema();
        CHECK(ext.first == doctest::Approx(lo).epsilon(1e-12));
        CHECK(ext.second == doctest::Approx(hi).epsilon(1e-12));
        CHECK(ext.first > 0.0);
    }
}

TEST_CASE("alpha equals the endpoint minimum of |r'| (dense sampling oracle)")
{
    std::mt19937 rng(7004);
    std::uniform_real_distribution<double> ur(0.2, 4.0);
    std::uniform_int_distribution<int> un(2, 7);
    for (int rep = 0; rep < 20; ++rep) {
        const double r0 = ur(rng);
        AnnulusGeometry g(un(rng), r0, r0 + ur(rng));
        double dense = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 2000; ++k)
            dense = std::min(dense, std::abs(g.rprime_of_t(k / 2000.0)));
        CHECK(g.alpha() == doctest::Approx(dense).epsilon(1e-10));
        CHECK(g.alpha() ==
              doctest::Approx(std::min(std::abs(g.rprime_of_t(0.0)),
                                       std::abs(g.rprime_of_t(1.0)))).epsilon(1e-14));
    }
}
