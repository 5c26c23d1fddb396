#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "quakestat/errors.hpp"
#include "quakestat/quadrature.hpp"

using namespace quakestat;

TEST(Quadrature, KnownIntegrals) {
    EXPECT_NEAR(quad::integrate([](double x) { return std::exp(-x * x); }, 0.0, INFINITY).value,
                0.5 * std::sqrt(std::numbers::pi), 1e-14);
    EXPECT_NEAR(quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value, 2.0, 1e-12);
    EXPECT_NEAR(quad::integrate([](double x) { return std::log(x); }, 0.0, 1.0).value, -1.0, 1e-12);
    EXPECT_NEAR(quad::integrate_smooth([](double x) { return std::cos(x); }, 0.0, 1.0).value, std::sin(1.0), 1e-14);
}

TEST(Quadrature, ReversedAndEmptyIntervals) {
    auto f = [](double x) { return x * x; };
    EXPECT_NEAR(quad::integrate(f, 1.0, 0.0).value, -1.0 / 3.0, 1e-14);
    EXPECT_EQ(quad::integrate(f, 2.0, 2.0).value, 0.0);
}

TEST(Quadrature, IntervalsFewUlpsWide) {
    auto f = [](double x) { return std::exp(-x * x); };
    const double a = std::sqrt(2.0);
    const double b = std::nextafter(a, 3.0);
    const auto r = quad::integrate(f, a, b, 1e-12, 1e-10);
    EXPECT_NEAR(r.value, (b - a) * f(a), 1e-30);
    const double pts[] = {0.0, a, b, 4.0};
    EXPECT_NEAR(quad::integrate_pieces(f, pts, 1e-12).value, 0.5 * std::sqrt(std::numbers::pi) * std::erf(4.0), 1e-14);
}

TEST(Quadrature, PiecesJudgeTheTotal) {
    // the far piece is negligible and need not reach relative accuracy alone
    auto f = [](double x) { return std::exp(-x); };
    const auto r = quad::integrate_pieces(f, {0.0, 1.0, 10.0, 700.0, INFINITY}, 1e-12);
    EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(Quadrature, FailureCarriesDiagnostic) {
    try {
        quad::integrate([](double x) { return std::sin(1.0 / x) / (x * x); }, 1e-6, 1.0, 1e-14);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("did not converge"), std::string::npos) << msg;
        EXPECT_NE(msg.find("error estimate"), std::string::npos) << msg;
    }
}
