#include <doctest.h>

#include <cmath>
#include <random>

#include "annulus/nonlinear_system.hpp"

using namespace annulus;

namespace {
const char* PAPER_F1 =
    "exp(-(gu^2+gv^2+6))*u*(u-1-r^2/333)*(u-2-r^2/333)*(u-4-r^2/333)*(2-cos(v))";
const char* PAPER_F2 =
    "exp(-(gu^2+gv^2+7))*v*(v-1-r^2/333)*(v-4-r^2/333)*(v-7-r^2/333)*(2-sin(u))";

NonlinearSystem paper_system()
{
    return NonlinearSystem(Expr::parse(PAPER_F1), Expr::parse(PAPER_F2), 1.0, 1.0,
                           AnnulusGeometry(2, 1.0, M_E));
}
} // namespace

TEST_CASE("eval_g: zero nonlinearity reduces to the shift")
{
    NonlinearSystem sys(Expr::parse("0"), Expr::parse("0"), 1.0, 2.0,
                        AnnulusGeometry(2, 1.0, M_E));
    CHECK(sys.eval_g(1, 0.5, 2.0, 0.0, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sys.eval_g(2, 0.25, 0.0, 3.0, 0.0, 0.0) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK_THROWS_AS(sys.eval_g(3, 0.5, 1, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("eval_g on the worked example")
{
    NonlinearSystem sys = paper_system();
    CHECK(sys.eval_g(1, 1.0, 0.0, 0.0, 0.0, 0.0) == 0.0);
    // d(1) = 1 and r(1) = 1, so g = f1(1, 1/2, 0, 0, 0) + 1/2
    const double h = 1.0 / 333.0;
    const double f = std::exp(-6.0) * 0.5 * (0.5 - 1 - h) * (0.5 - 2 - h) * (0.5 - 4 - h);
    CHECK(sys.eval_g(1, 1.0, 0.5, 0.0, 0.0, 0.0) == doctest::Approx(f + 0.5).epsilon(1e-14));
    // gradient arguments are scaled by 1/|r'(t)|
    const double t = 0.25;
    const double rp = std::abs(sys.geometry().rprime_of_t(t));
    const double lhs = sys.eval_g(1, t, 1.0, 1.0, 0.7, 0.3);
    const double rhs = sys.geometry().d_of_t(t) *
                           sys.eval_f(1, sys.geometry().r_of_t(t), 1.0, 1.0, 0.7 / rp,
                                      0.3 / rp) +
                       1.0;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("check_H verdicts")
{
    AnnulusGeometry geom(2, 1.0, M_E);

    NonlinearSystem zero(Expr::parse("0"), Expr::parse("0"), 1.0, 1.0, geom);
    auto r0 = check_H(zero, 5, 10.0);
    CHECK(r0.pass);
    CHECK(r0.worst_margin == doctest::Approx(0.0));

    auto rp = check_H(paper_system(), 9, 80.0);
    CHECK(rp.pass);

    // f1 = -u needs -u >= -u/e^2, impossible for u > 0
    NonlinearSystem bad(Expr::parse("-u"), Expr::parse("0"), 1.0, 1.0, geom);
    auto rb = check_H(bad, 5, 10.0);
    CHECK(!rb.pass);
    CHECK(rb.component == 1);
    CHECK(rb.worst_margin < 0.0);
    CHECK(rb.witness[1] > 0.0); // witness has u > 0

    CHECK_THROWS_AS(check_H(zero, 1, 10.0), std::invalid_argument);
}

TEST_CASE("g is non-negative on the box when (H) holds")
{
    NonlinearSystem sys = paper_system();
    REQUIRE(check_H(sys, 9, 80.0).pass);
    std::mt19937 rng(10001);
    std::uniform_real_distribution<double> ub(0.0, 8.0), ut(0.0, 1.0);
    for (int rep = 0; rep < 100000; ++rep) {
        const int i = 1 + (rep & 1);
        const double g = sys.eval_g(i, ut(rng), ub(rng), ub(rng), ub(rng), ub(rng));
        CHECK(g >= -1e-12);
    }
}
