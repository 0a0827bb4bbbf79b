#include <cmath>
#include <limits>

#include "doctest.h"
#include "lrsi/specialfun.hpp"

using namespace lrsi;

namespace {

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Bessel integral representations; the [0, pi] integrands are periodic and
// smooth, so Simpson converges very fast.
double j0_integral(double x) {
    return simpson([x](double t) { return std::cos(x * std::sin(t)); }, 0.0, kPi, 2000) / kPi;
}
double j1_integral(double x) {
    return simpson([x](double t) { return std::cos(t - x * std::sin(t)); }, 0.0, kPi, 2000) / kPi;
}
double y0_integral(double x) {
    const double a = simpson([x](double t) { return std::sin(x * std::sin(t)); }, 0.0, kPi, 20000) / kPi;
    const double top = std::asinh(60.0 / x);
    const double b = simpson([x](double t) { return std::exp(-x * std::sinh(t)); }, 0.0, top, 200000);
    return a - 2.0 / kPi * b;
}
double y1_integral(double x) {
    const double a = simpson([x](double t) { return std::sin(x * std::sin(t) - t); }, 0.0, kPi, 20000) / kPi;
    const double top = std::asinh(60.0 / x);
    const double b = simpson([x](double t) { return 2.0 * std::sinh(t) * std::exp(-x * std::sinh(t)); }, 0.0,
                             top, 200000);
    return a - b / kPi;
}

}  // namespace

TEST_CASE("tabulated values at x = 1") {
    CHECK(bessel_j0(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-14));
    CHECK(bessel_y0(1.0) == doctest::Approx(0.08825696421567696).epsilon(1e-13));
    CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-14));
    CHECK(bessel_y1(1.0) == doctest::Approx(-0.7812128213002887).epsilon(1e-13));
}

TEST_CASE("first zero of J0") {
    CHECK(std::fabs(bessel_j0(2.404825557695773)) < 1e-14);
    CHECK(bessel_j0(2.40) > 0.0);
    CHECK(bessel_j0(2.41) < 0.0);
}

TEST_CASE("J0 and J1 agree with the integral representation") {
    for (double x : {0.0, 0.3, 1.7, 5.0, 9.9, 15.5, 16.5, 25.0, 40.0}) {
        CAPTURE(x);
        CHECK(std::fabs(bessel_j0(x) - j0_integral(x)) < 1e-13);
        CHECK(std::fabs(bessel_j1(x) - j1_integral(x)) < 1e-13);
    }
}

TEST_CASE("Y0 and Y1 agree with the integral representation") {
    for (double x : {0.5, 1.7, 5.0, 9.9, 15.5, 16.5, 25.0}) {
        CAPTURE(x);
        CHECK(std::fabs(bessel_y0(x) - y0_integral(x)) < 1e-10);
        CHECK(std::fabs(bessel_y1(x) - y1_integral(x)) < 1e-10);
    }
}

TEST_CASE("agreement with the standard library over a sweep") {
    for (int i = 1; i <= 400; ++i) {
        const double x = 0.05 * i * i / 20.0;
        CAPTURE(x);
        const double scale = std::max(1.0, std::sqrt(x));
        CHECK(std::fabs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-12 / scale * 10);
        CHECK(std::fabs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-12 / scale * 10);
        CHECK(std::fabs(bessel_y0(x) - std::cyl_neumann(0.0, x)) < 1e-11);
        CHECK(std::fabs(bessel_y1(x) - std::cyl_neumann(1.0, x)) < 1e-11 * std::max(1.0, 1.0 / x));
    }
}

TEST_CASE("Wronskian J1 Y0 - J0 Y1 = 2/(pi x)") {
    for (double x : {0.01, 0.2, 1.0, 3.3, 8.0, 15.9, 16.1, 30.0, 123.4, 1000.0}) {
        CAPTURE(x);
        const double w = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x);
        CHECK(w * kPi * x / 2.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("H0 at large argument matches the two-term asymptotic form") {
    const double x = 1e3;
    const double p = 1.0 - 9.0 / (128.0 * x * x);
    const double q = -1.0 / (8.0 * x) + 75.0 / (1024.0 * x * x * x);
    const cplx ph = std::exp(cplx(0.0, x - kPi / 4.0));
    const cplx expect = std::sqrt(2.0 / (kPi * x)) * cplx(p, q) * ph;
    CHECK(std::abs(hankel1(0, x) - expect) < 1e-13);
}

TEST_CASE("no jump across the series/asymptotic seam") {
    const double x = kBesselCrossover;
    const double e = 1e-9;
    const auto lo = hankel1_01(x - e);
    const auto hi = hankel1_01(x + e);
    // Derivative magnitudes are below 1, so a smooth function moves < 2e-9.
    CHECK(std::abs(lo.h0 - hi.h0) < 1e-8);
    CHECK(std::abs(lo.h1 - hi.h1) < 1e-8);
    const auto at = hankel1_01(x);
    CHECK(std::abs(at.h0 - cplx(std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x))) < 1e-12);
    CHECK(std::abs(at.h1 - cplx(std::cyl_bessel_j(1.0, x), std::cyl_neumann(1.0, x))) < 1e-12);
}

TEST_CASE("combined and single evaluations agree") {
    for (double x : {0.7, 12.0, 50.0}) {
        const auto h = hankel1_01(x);
        CHECK(h.h0 == hankel1(0, x));
        CHECK(h.h1 == hankel1(1, x));
        const auto j = bessel_j01(x);
        CHECK(j.j0 == bessel_j0(x));
        CHECK(j.j1 == bessel_j1(x));
    }
}

TEST_CASE("parity for negative arguments") {
    CHECK(bessel_j0(-3.0) == bessel_j0(3.0));
    CHECK(bessel_j1(-3.0) == -bessel_j1(3.0));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(bessel_y0(0.0), DomainError);
    CHECK_THROWS_AS(bessel_y1(-1.0), DomainError);
    CHECK_THROWS_AS(hankel1(0, 0.0), DomainError);
    CHECK_THROWS_AS(hankel1(2, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_j0(std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(bessel_j1(std::numeric_limits<double>::infinity()), DomainError);
}
