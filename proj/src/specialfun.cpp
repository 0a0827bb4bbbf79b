#include "lrsi/specialfun.hpp"

#include <cmath>

namespace lrsi {
namespace {

struct SeriesValues {
    double j0, j1, y0, y1;
};

// J and Y from their ascending series, summed in long double. The largest
// term near the crossover is about 5e5, so cancellation costs ~1e-13.
SeriesValues series(double xd, bool want_y) {
    const long double x = xd;
    const long double z = x * x / 4.0L;
    long double t0 = 1.0L;  // (-z)^m / (m!)^2
    long double t1 = 1.0L;  // (-z)^m / (m!(m+1)!)
    long double s0 = t0;
    long double s1 = t1;
    long double hm = 0.0L;        // H_m
    long double hm1 = 1.0L;       // H_{m+1}
    long double y0sum = 0.0L;     // sum H_m t0
    long double y1sum = hm + hm1; // sum (H_m + H_{m+1}) t1
    for (int m = 1; m < 400; ++m) {
        const long double md = m;
        t0 *= -z / (md * md);
        t1 *= -z / (md * (md + 1.0L));
        hm = hm1;
        hm1 += 1.0L / (md + 1.0L);
        s0 += t0;
        s1 += t1;
        y0sum += hm * t0;
        y1sum += (hm + hm1) * t1;
        if (md * md > z && std::fabs(t0) * (hm1 + 1.0L) < 1e-22L &&
            std::fabs(t1) * (hm1 + 1.0L) < 1e-22L)
            break;
    }
    SeriesValues v{};
    const long double j0 = s0;
    const long double j1 = 0.5L * x * s1;
    v.j0 = static_cast<double>(j0);
    v.j1 = static_cast<double>(j1);
    if (want_y) {
        const long double pi = 3.141592653589793238462643383279502884L;
        const long double g = 0.577215664901532860606512090082402431L;
        const long double lg = std::log(0.5L * x);
        v.y0 = static_cast<double>((2.0L / pi) * ((lg + g) * j0 - y0sum));
        // psi(m+1) + psi(m+2) = H_m + H_{m+1} - 2 gamma
        const long double s1full = y1sum - 2.0L * g * s1;
        v.y1 = static_cast<double>(-2.0L / (pi * x) + (2.0L / pi) * lg * j1 -
                                   (0.5L * x / pi) * s1full);
    } else {
        v.y0 = v.y1 = 0.0;
    }
    return v;
}

// Sum of i^k a_k(nu) / x^k, stopped at the smallest term.
cplx asymptotic_sum(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    cplx term(1.0, 0.0);
    cplx sum = term;
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= cplx(0.0, (mu - odd * odd) / (8.0 * k * x));
        const double mag = std::abs(term);
        if (mag > prev) break;
        sum += term;
        prev = mag;
        if (mag < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} times the asymptotic sum.
Hankel01 asymptotic(double x) {
    const double amp = std::sqrt(2.0 / (kPi * x));
    const cplx eix(std::cos(x), std::sin(x));
    const double r = std::sqrt(0.5);
    const cplx rot0(r, -r);   // e^{-i pi/4}
    const cplx rot1(-r, -r);  // e^{-3i pi/4}
    Hankel01 h;
    h.h0 = amp * eix * rot0 * asymptotic_sum(0, x);
    h.h1 = amp * eix * rot1 * asymptotic_sum(1, x);
    return h;
}

void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

void require_positive(double x, const char* fn) {
    require_finite(x, fn);
    if (!(x > 0.0)) throw DomainError(std::string(fn) + ": argument must be > 0");
}

}  // namespace

Bessel01 bessel_j01(double x) {
    require_finite(x, "bessel_j01");
    const double ax = std::fabs(x);
    Bessel01 b{};
    if (ax < kBesselCrossover) {
        const auto s = series(ax, false);
        b.j0 = s.j0;
        b.j1 = s.j1;
    } else {
        const auto h = asymptotic(ax);
        b.j0 = h.h0.real();
        b.j1 = h.h1.real();
    }
    if (x < 0.0) b.j1 = -b.j1;
    return b;
}

double bessel_j0(double x) { return bessel_j01(x).j0; }
double bessel_j1(double x) { return bessel_j01(x).j1; }

Hankel01 hankel1_01(double x) {
    require_positive(x, "hankel1");
    if (x < kBesselCrossover) {
        const auto s = series(x, true);
        return {cplx(s.j0, s.y0), cplx(s.j1, s.y1)};
    }
    return asymptotic(x);
}

double bessel_y0(double x) { return hankel1_01(x).h0.imag(); }
double bessel_y1(double x) { return hankel1_01(x).h1.imag(); }

cplx hankel1(int order, double x) {
    if (order != 0 && order != 1) throw DomainError("hankel1: order must be 0 or 1");
    const auto h = hankel1_01(x);
    return order == 0 ? h.h0 : h.h1;
}

}  // namespace lrsi
