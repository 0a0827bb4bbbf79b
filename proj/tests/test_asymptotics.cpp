#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "lrsi/asymptotics.hpp"
#include "lrsi/forward.hpp"
#include "lrsi/quadrature.hpp"

using namespace lrsi;

namespace {

cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

// Composite Gauss-Legendre with `panels` equal panels of 20 nodes.
template <class F>
cplx gl_sum(F f, double a, double b, int panels) {
    static const quad::Rule rule = quad::gauss_legendre(20);
    const double h = (b - a) / panels;
    cplx s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + 0.5 * h * rule.nodes[i]);
    }
    return 0.5 * h * s;
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// p = 2 al sin^2(t/2) + be t^3, q = e^{i om t}(c0 + c1 t) on [0, b].
struct Instance {
    double al, be, om;
    cplx c0, c1;
    PhaseIntegral pi;
};

Instance make_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Instance in;
    in.al = 0.5 + 2.0 * u(rng);
    in.be = 0.5 * u(rng);
    in.om = -3.0 + 6.0 * u(rng);
    in.c0 = {0.5 + u(rng), -0.5 + u(rng)};
    in.c1 = {-1.0 + 2.0 * u(rng), -1.0 + 2.0 * u(rng)};
    const double al = in.al, be = in.be, om = in.om;
    const cplx c0 = in.c0, c1 = in.c1;
    auto& pi = in.pi;
    pi.a = 0.0;
    pi.b = 0.5 + 2.0 * u(rng);
    pi.gamma = std::pow(10.0, 2.0 + 3.0 * u(rng));
    pi.p = [=](double t) {
        const double s = std::sin(0.5 * t);
        return 2.0 * al * s * s + be * t * t * t;
    };
    pi.dp = [=](double t) { return al * std::sin(t) + 3.0 * be * t * t; };
    pi.d2p = [=](double t) { return al * std::cos(t) + 6.0 * be * t; };
    pi.q = [=](double t) { return expi(om * t) * (c0 + c1 * t); };
    pi.dq = [=](double t) { return expi(om * t) * (c1 + cplx(0.0, om) * (c0 + c1 * t)); };
    pi.mu = 2.0;
    pi.lambda = 1.0;
    pi.p0 = 0.5 * al;
    pi.p1 = be;
    pi.q0 = c0;
    pi.q1 = c1 + cplx(0.0, om) * c0;
    return in;
}

// Panels sized to a fraction of the fastest local period.
cplx reference_integral(const Instance& in) {
    const auto& pi = in.pi;
    const double slope = pi.gamma * (in.al + 3.0 * in.be * pi.b * pi.b) + std::fabs(in.om);
    const int panels = static_cast<int>(std::ceil(slope * (pi.b - pi.a) / (2.0 * kPi))) + 8;
    return gl_sum([&](double t) { return expi(pi.gamma * pi.p(t)) * pi.q(t); }, pi.a, pi.b, panels);
}

// Values and first derivative at 0 of the polynomial interpolating (s_j, g_j).
std::pair<cplx, cplx> interpolate_at_zero(const std::vector<double>& s, const std::vector<cplx>& g) {
    const std::size_t n = s.size();
    std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        double pw = 1.0;
        for (std::size_t j = 0; j < n; ++j, pw *= s[i]) a[i][j] = pw;
        a[i][n] = g[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const cplx f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return {a[0][n] / a[0][0], a[1][n] / a[1][1]};
}

cplx direction_oracle(const Vec2& x, const Vec2& zz, double k) {
    const int panels = 40 + static_cast<int>(4.0 * k * (norm(x) + norm(zz)));
    return -gl_sum(
        [&](double th) {
            const Vec2 d{std::cos(th), std::sin(th)};
            return expi(k * (x.x1 * d.x1 - x.x2 * d.x2 - dot(zz, d)));
        },
        kPi, 2.0 * kPi, panels);
}

}  // namespace

TEST_CASE("van der Corput bound holds on worked examples") {
    // u = t + t^2 on [0, 1], phi = 1: bound 4/lambda.
    auto du = [](double t) { return 1.0 + 2.0 * t; };
    auto one = [](double) { return cplx(1.0, 0.0); };
    auto zero = [](double) { return cplx(0.0, 0.0); };
    CHECK(vdc_bound(0.0, 1.0, du, one, zero, 50.0, 1) == doctest::Approx(4.0 / 50.0).epsilon(1e-12));
    // phi = t: |phi(1)| + int |phi'| = 2.
    auto lin = [](double t) { return cplx(t, 0.0); };
    auto dlin = [](double) { return cplx(1.0, 0.0); };
    CHECK(vdc_bound(0.0, 1.0, du, lin, dlin, 10.0, 2) == doctest::Approx(6.0 / 10.0 * 2.0).epsilon(1e-10));
}

TEST_CASE("van der Corput bound dominates 100 random integrals") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double c = u(rng), b = 0.5 + 1.5 * u(rng), om = -4.0 + 8.0 * u(rng), s = -1.0 + 2.0 * u(rng);
        const double lam = std::pow(10.0, 1.0 + 2.0 * u(rng));
        auto uu = [=](double t) { return t + c * t * t; };
        auto du = [=](double t) { return 1.0 + 2.0 * c * t; };
        auto phi = [=](double t) { return expi(om * t) * (1.0 + s * t); };
        auto dphi = [=](double t) { return expi(om * t) * (s + cplx(0.0, om) * (1.0 + s * t)); };
        const double bound = vdc_bound(0.0, b, du, phi, dphi, lam, 1);
        const int panels = 20 + static_cast<int>((lam * (1.0 + 2.0 * c * b) + std::fabs(om)) * b);
        const double value = std::abs(gl_sum([&](double t) { return expi(lam * uu(t)) * phi(t); }, 0.0, b, panels));
        CAPTURE(i);
        CHECK(value <= bound);
        worst = std::max(worst, value / bound);
    }
    CHECK(worst > 0.0);
}

TEST_CASE("van der Corput rejects slow phases and bad arguments") {
    auto du = [](double t) { return 0.5 + t; };
    auto one = [](double) { return cplx(1.0, 0.0); };
    auto zero = [](double) { return cplx(0.0, 0.0); };
    CHECK_THROWS_AS(vdc_bound(0.0, 1.0, du, one, zero, 10.0, 1), DomainError);
    auto fast = [](double) { return 2.0; };
    CHECK_THROWS_AS(vdc_bound(1.0, 0.0, fast, one, zero, 10.0, 1), DomainError);
    CHECK_THROWS_AS(vdc_bound(0.0, 1.0, fast, one, zero, 0.0, 1), DomainError);
    CHECK_THROWS_AS(vdc_bound(0.0, 1.0, fast, one, zero, 10.0, 0), DomainError);
}

TEST_CASE("zero amplitude gives a zero expansion and a zero bound") {
    std::mt19937_64 rng(5);
    auto in = make_instance(rng);
    in.pi.q = [](double) { return cplx(0.0, 0.0); };
    in.pi.dq = in.pi.q;
    in.pi.q0 = 0.0;
    in.pi.q1 = 0.0;
    const auto r = stationary_expand(in.pi, 0, 1);
    CHECK(r.value == cplx(0.0, 0.0));
    CHECK(r.bound() == 0.0);
}

TEST_CASE("Fresnel leading term") {
    // int_0^inf e^{i gamma t^2} dt = (1/2) sqrt(pi/gamma) e^{i pi/4}.
    PhaseIntegral pi;
    pi.a = 0.0;
    pi.b = 1.0;
    pi.p = [](double t) { return t * t; };
    pi.dp = [](double t) { return 2.0 * t; };
    pi.d2p = [](double) { return 2.0; };
    pi.q = [](double) { return cplx(1.0, 0.0); };
    pi.dq = [](double) { return cplx(0.0, 0.0); };
    pi.gamma = 1e4;
    const auto r = stationary_expand(pi, 0, 1);
    const cplx expect = 0.5 * std::sqrt(kPi / pi.gamma) * expi(0.25 * kPi);
    CHECK(std::abs(r.leading - expect) < 1e-15);
    CHECK(r.a0 == cplx(0.5, 0.0));
    CHECK(r.a1 == cplx(0.0, 0.0));
    // The remainder is the tail beyond b, about 1/(2 gamma).
    const cplx exact = gl_sum([&](double t) { return expi(pi.gamma * t * t); }, 0.0, 1.0, 4000);
    const double err = std::abs(exact - r.value);
    CHECK(err <= r.bound());
    CHECK(std::fabs(err * pi.gamma - 0.5) < 0.01);
}

TEST_CASE("leading term of a random instance at gamma = 1e4") {
    std::mt19937_64 rng(11);
    auto in = make_instance(rng);
    in.pi.gamma = 1e4;
    const auto r = stationary_expand(in.pi, 0, 1);
    // p ~ (al/2) t^2 near 0, q ~ c0: e^{i pi/4} Gamma(1/2) c0 / (2 sqrt(al/2)) gamma^{-1/2}.
    const cplx expect = expi(0.25 * kPi) * std::sqrt(kPi) * in.c0 / (2.0 * std::sqrt(0.5 * in.al)) / 100.0;
    CHECK(std::abs(r.leading - expect) < 1e-14);
    const double err = std::abs(reference_integral(in) - r.value);
    CHECK(err < 5.0 / in.pi.gamma * std::abs(in.c0) * 10.0);
}

TEST_CASE("expansion coefficients match the reversion of q/p'") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        auto in = make_instance(rng);
        const auto& pi = in.pi;
        // g(s) = s f(s^2) = a0 + a1 s + O(s^2) with v = s^2 = p(t).
        std::vector<double> s;
        std::vector<cplx> g;
        const int n = 12;
        const double smax = 0.1;
        for (int j = 0; j < n; ++j) {
            const double sj = 0.5 * smax * (1.0 - std::cos(kPi * (j + 0.5) / n));
            double t = sj / std::sqrt(0.5 * in.al);
            for (int it = 0; it < 60; ++it) t -= (pi.p(t) - sj * sj) / pi.dp(t);
            s.push_back(sj);
            g.push_back(sj * pi.q(t) / pi.dp(t));
        }
        const auto [c0, c1] = interpolate_at_zero(s, g);
        CAPTURE(trial);
        CHECK(std::abs(expansion_a0(pi) - c0) < 1e-8);
        CHECK(std::abs(expansion_a1(pi) - c1) < 1e-8);
    }
}

TEST_CASE("error bounds hold on 50 random instances") {
    std::mt19937_64 rng(20240601);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
        const auto in = make_instance(rng);
        const auto r = stationary_expand(in.pi, 0, 1);
        const cplx ref = reference_integral(in);
        if (i < 10) CHECK(std::abs(oscillatory_quadrature(in.pi) - ref) < 1e-9);
        const double err = std::abs(ref - r.value);
        CAPTURE(i);
        CHECK(std::isfinite(r.bound()));
        if (!(err <= r.bound())) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("order (1, 1) is finite in value and unbounded at lambda = 1") {
    std::mt19937_64 rng(3);
    const auto in = make_instance(rng);
    const auto r0 = stationary_expand(in.pi, 0, 1);
    const auto r1 = stationary_expand(in.pi, 1, 1);
    CHECK(std::isfinite(std::abs(r1.value)));
    CHECK(std::isinf(r1.bound()));
    // The extra a1 term and the endpoint correction at b are both O(1/gamma).
    CHECK(std::abs(r1.value - r0.value) < 50.0 / in.pi.gamma);
}

TEST_CASE("admissible orders") {
    PhaseIntegral pi;  // mu = 2, lambda = 1
    CHECK(admissible(pi, 0, 0));
    CHECK(admissible(pi, 0, 1));
    CHECK_FALSE(admissible(pi, 0, 2));
    CHECK_FALSE(admissible(pi, 1, 0));
    CHECK(admissible(pi, 1, 1));
    CHECK(admissible(pi, 1, 3));
    CHECK_FALSE(admissible(pi, 1, 4));
    CHECK_FALSE(admissible(pi, 0, -1));
}

TEST_CASE("contract and domain errors") {
    std::mt19937_64 rng(8);
    auto in = make_instance(rng);
    CHECK_THROWS_AS(stationary_expand(in.pi, 0, 2), ContractError);
    CHECK_THROWS_AS(stationary_expand(in.pi, 1, 3), ContractError);  // needs a2
    CHECK_THROWS_AS(stationary_expand(in.pi, 2, 4), ContractError);
    auto cubic = in.pi;
    cubic.mu = 3.0;
    CHECK_THROWS_AS(stationary_expand(cubic, 0, 1), ContractError);
    auto heavy = in.pi;
    heavy.lambda = 4.0;
    CHECK_THROWS_AS(stationary_expand(heavy, 0, 1), ContractError);
    auto g = in.pi;
    g.gamma = 0.0;
    CHECK_THROWS_AS(stationary_expand(g, 0, 1), DomainError);
    auto back = in.pi;
    back.a = 1.0;
    back.b = 0.5;
    CHECK_THROWS_AS(stationary_expand(back, 0, 1), DomainError);
    auto dec = in.pi;
    dec.dp = [](double t) { return 1.0 - 2.0 * t; };
    dec.b = 1.0;
    CHECK_THROWS_AS(stationary_expand(dec, 0, 1), DomainError);
    auto p0 = in.pi;
    p0.p0 = 0.0;
    CHECK_THROWS_AS(stationary_expand(p0, 0, 1), DomainError);

    CHECK_THROWS_AS(u2_closed({1.0, 0.0}, {0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(u3_closed({1.0, -1.0}, {0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(u2_closed({1.0, 1.0}, {0.0, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(u2_quadrature({1.0, 1.0}, {0.0, 0.0}, -1.0), DomainError);
    CHECK_THROWS_AS(u1_asymptotic({}, {1.0, 1.0}, {0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(u1_asymptotic({1.0}, {0.0, 0.0}, {0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("U2 and U3 coincide for a point on the axis") {
    const Vec2 x = polar(37.0, 1.1);
    CHECK(u2_closed(x, {0.3, 0.0}, 7.0) == u3_closed(x, {0.3, 0.0}, 7.0));
    CHECK(std::abs(u2_quadrature(x, {0.3, 0.0}, 7.0) - u3_quadrature(x, {0.3, 0.0}, 7.0)) < 1e-12);
}

TEST_CASE("direction integrals match an independent quadrature") {
    const double k = 10.0;
    const Vec2 z{0.2, -0.15};
    for (double r : {1.0, 20.0, 150.0}) {
        for (double th : {0.3, 1.2, 2.9}) {
            const Vec2 x = polar(r, th);
            CAPTURE(r);
            CAPTURE(th);
            CHECK(std::abs(u2_quadrature(x, z, k) - direction_oracle(x, z, k)) < 1e-10);
            CHECK(std::abs(u3_quadrature(x, z, k) - direction_oracle(x, mirror(z), k)) < 1e-10);
        }
    }
}

TEST_CASE("closed forms approach the direction integrals like 1/|x|") {
    // The leading term is O(|x|^{-1/2}); the two endpoints of S- leave
    // O(1/(k |x| sin theta)) behind.
    const double k = 10.0;
    const Vec2 z{0.2, -0.15};
    const double th = 1.0;
    std::vector<double> rs{50.0, 100.0, 200.0, 400.0, 800.0, 1600.0}, e2, e3;
    for (double r : rs) {
        const Vec2 x = polar(r, th);
        e2.push_back(std::abs(u2_closed(x, z, k) - direction_oracle(x, z, k)));
        e3.push_back(std::abs(u3_closed(x, z, k) - direction_oracle(x, mirror(z), k)));
        CAPTURE(r);
        CHECK(e2.back() < 3.0 / (k * r * std::sin(th)));
        CHECK(e3.back() < 3.0 / (k * r * std::sin(th)));
        CHECK(e3.back() < 0.1 * std::abs(u3_closed(x, z, k)));
    }
    // The endpoint terms interfere, so the fitted slope wanders around -1.
    for (double sl : {loglog_slope(rs, e2), loglog_slope(rs, e3)}) {
        CHECK(sl < -0.7);
        CHECK(sl > -1.3);
    }
}

TEST_CASE("closed-form error grows like 1/theta toward the axis") {
    const double k = 10.0, r = 200.0;
    const Vec2 z{0.0, 0.0};
    std::vector<double> ths{0.8, 0.4, 0.2, 0.1, 0.05, 0.025}, err;
    for (double th : ths) {
        const Vec2 x = polar(r, th);
        err.push_back(std::abs(u3_closed(x, z, k) - direction_oracle(x, z, k)));
        CAPTURE(th);
        CHECK(err.back() < 3.0 / (k * r * std::sin(th)));
    }
    const double slope = loglog_slope(ths, err);
    CHECK(slope < -0.7);
    CHECK(slope > -1.3);
}

TEST_CASE("u1 from a far-field row") {
    const Vec2 x = polar(300.0, 2.0), z{0.1, -0.3};
    const double k = 6.0;
    std::vector<cplx> zero(16, 0.0);
    CHECK(u1_asymptotic(zero, x, z, k) == cplx(0.0, 0.0));
    std::vector<cplx> row(16);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = cplx(std::cos(0.3 * j), std::sin(0.7 * j));
    cplx sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double a = kPi + kPi * (j + 0.5) / 16.0;
        sum += row[j] * expi(-k * (z.x1 * std::cos(a) + z.x2 * std::sin(a)));
    }
    const cplx expect = expi(k * 300.0) / std::sqrt(300.0) * kPi / 16.0 * sum;
    CHECK(std::abs(u1_asymptotic(row, x, z, k) - expect) < 1e-13);
}
