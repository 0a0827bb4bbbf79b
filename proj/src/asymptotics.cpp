#include "lrsi/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrsi/forward.hpp"
#include "lrsi/quadrature.hpp"

namespace lrsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// 1/Gamma(x), zero at the poles.
double rgamma(double x) {
    if (x <= 0.0 && std::fabs(x - std::round(x)) < 1e-14) return 0.0;
    return 1.0 / std::tgamma(x);
}

// Gamma((s+lambda)/mu) / Gamma((s+lambda-m mu)/mu): the factor produced by
// differentiating v^{(s+lambda)/mu - 1} m times.
double derivative_factor(double s, double lambda, double mu, int m) {
    return std::tgamma((s + lambda) / mu) * rgamma((s + lambda - m * mu) / mu);
}

void probe_increasing(const PhaseIntegral& pi) {
    const int n = 512;
    for (int i = 1; i < n; ++i) {
        const double t = pi.a + (pi.b - pi.a) * i / n;
        if (!(pi.dp(t) > 0.0)) throw DomainError("phase integral: p' must be positive on (a, b)");
    }
}

struct Coeffs {
    cplx a[2];
    int count = 2;
};

cplx coeff(const Coeffs& c, int s) {
    if (s < 0 || s >= c.count) throw ContractError("stationary_expand: coefficient a_" + std::to_string(s) + " is not implemented");
    return c.a[s];
}

// P_m(t) for m = 0, 1.
cplx p_series(const PhaseIntegral& pi, int m, double t) {
    const double d1 = pi.dp(t);
    if (m == 0) return pi.q(t) / d1;
    const double d2 = pi.d2p(t);
    return (pi.dq(t) * d1 - pi.q(t) * d2) / (d1 * d1 * d1);
}

}  // namespace

double vdc_bound(double a, double b, const RealFn& du, const ComplexFn& phi, const ComplexFn& dphi, double lambda,
                 int monotone_pieces) {
    if (!(b > a)) throw DomainError("vdc_bound: need a < b");
    if (!(lambda > 0.0)) throw DomainError("vdc_bound: lambda must be positive");
    if (monotone_pieces < 1) throw DomainError("vdc_bound: need at least one monotone piece");
    const int probes = 1000;
    for (int i = 1; i < probes; ++i) {
        const double t = a + (b - a) * i / probes;
        if (std::fabs(du(t)) < 1.0) throw DomainError("vdc_bound: |u'| < 1 inside the interval");
    }
    const double tv = quad::gauss_kronrod_real([&](double t) { return std::abs(dphi(t)); }, a, b,
                                               {1e-13, 1e-12, 200000});
    return (2.0 * monotone_pieces + 2.0) / lambda * (std::abs(phi(b)) + tv);
}

cplx expansion_a0(const PhaseIntegral& pi) {
    return pi.q0 / (pi.mu * std::pow(pi.p0, pi.lambda / pi.mu));
}

cplx expansion_a1(const PhaseIntegral& pi) {
    const double mu = pi.mu, la = pi.lambda;
    return (pi.q1 / mu - (la + 1.0) * pi.p1 * pi.q0 / (mu * mu * pi.p0)) / std::pow(pi.p0, (la + 1.0) / mu);
}

bool admissible(const PhaseIntegral& pi, int m, int n) {
    return n >= 0 && m * pi.mu - pi.lambda <= n && n < (m + 1) * pi.mu - pi.lambda + 1.0;
}

ExpansionResult stationary_expand(const PhaseIntegral& pi, int m, int n) {
    if (pi.mu != 2.0) throw ContractError("stationary_expand: only mu = 2 is implemented");
    if (m < 0 || m > 1) throw ContractError("stationary_expand: m must be 0 or 1");
    if (!(pi.lambda > 0.0) || !((m + 1) * pi.mu + 1.0 > pi.lambda))
        throw ContractError("stationary_expand: lambda outside ((m+1) mu + 1 > lambda > 0)");
    if (!admissible(pi, m, n)) throw ContractError("stationary_expand: (m, n) not admissible");
    if (!(pi.b > pi.a)) throw DomainError("stationary_expand: need a < b");
    if (!(pi.p0 > 0.0)) throw DomainError("stationary_expand: p0 must be positive");
    if (!(pi.gamma > 0.0)) throw DomainError("stationary_expand: gamma must be positive");
    probe_increasing(pi);

    const double mu = pi.mu, la = pi.lambda, g = pi.gamma;
    const double pa = pi.p(pi.a), pb = pi.p(pi.b);
    Coeffs c;
    c.a[0] = expansion_a0(pi);
    c.a[1] = expansion_a1(pi);

    ExpansionResult r;
    r.a0 = c.a[0];
    r.a1 = c.a[1];

    const bool exact_start = std::fabs(n - (m * mu - la)) < 1e-12;
    const int top = exact_start ? n : n - 1;
    cplx sum_a = 0.0;
    for (int s = 0; s <= top; ++s) {
        const cplx term = expi((s + la) * kPi / (2.0 * mu)) * std::tgamma((s + la) / mu) * coeff(c, s) *
                          std::pow(g, -(s + la) / mu);
        if (s == 0) r.leading = expi(g * pa) * term;
        sum_a += term;
    }
    cplx sum_b = 0.0;
    cplx ig = cplx(0.0, 1.0 / g);
    cplx pw = ig;
    for (int s = 0; s <= m - 1; ++s) {
        sum_b += p_series(pi, s, pi.b) * pw;
        pw *= ig;
    }
    r.endpoint_b = expi(g * pb) * sum_b;
    r.value = expi(g * pa) * sum_a - r.endpoint_b;

    // Q_{m+1,n} and the bounds.
    auto beta = [&](int s) { return ((m + 1) * mu - s - la) / mu; };
    auto Q = [&](double t) {
        const double v = pi.p(t) - pa;
        cplx out = p_series(pi, m, t);
        for (int s = 0; s < n; ++s) out -= derivative_factor(s, la, mu, m) * coeff(c, s) * std::pow(v, -beta(s));
        return out;
    };

    double eps = 0.0;
    for (int s = 0; s < n; ++s) {
        const double f = std::tgamma((s + la) / mu) * std::fabs(rgamma((s + la - m * mu) / mu));
        eps += f * std::abs(coeff(c, s)) / std::pow(pb - pa, beta(s));
    }
    r.eps_bound = 2.0 / std::pow(g, m + 1) * eps;

    // Limit of Q at a: the first surviving term of the expansion beyond n - 1.
    double qa = 0.0;
    for (int s = n; s < n + 4; ++s) {
        const double factor = derivative_factor(s, la, mu, m);
        if (factor == 0.0) continue;
        const double e = -beta(s);
        if (e > 1e-12) {
            qa = 0.0;
        } else if (e > -1e-12) {
            qa = s < c.count ? std::fabs(factor) * std::abs(c.a[s]) : kInf;
        } else {
            qa = (s < c.count && c.a[s] == 0.0) ? 0.0 : kInf;
            if (qa == 0.0) continue;
        }
        break;
    }
    const double qb = std::abs(Q(pi.b));
    double tv = kInf;
    if (std::isfinite(qa)) {
        auto dQ = [&](double t) -> cplx {
            if (m == 0) {
                const double d1 = pi.dp(t), d2 = pi.d2p(t);
                const double v = pi.p(t) - pa;
                cplx out = (pi.dq(t) * d1 - pi.q(t) * d2) / (d1 * d1);
                for (int s = 0; s < n; ++s)
                    out += derivative_factor(s, la, mu, m) * coeff(c, s) * beta(s) * std::pow(v, -beta(s) - 1.0) * d1;
                return out;
            }
            const double h = 0.25 * std::min({t - pi.a, pi.b - t, 1e-3 * (pi.b - pi.a)});
            auto central = [&](double hh) { return (Q(t + hh) - Q(t - hh)) / (2.0 * hh); };
            return (4.0 * central(0.5 * h) - central(h)) / 3.0;
        };
        const double len = pi.b - pi.a;
        const double tau = 1e-7 * len;
        std::vector<double> breaks{pi.a + tau};
        for (int j = 20; j >= 1; --j) breaks.push_back(pi.a + len * std::ldexp(1.0, -j));
        breaks.push_back(pi.b);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        const double scale = std::max({1.0, qa, qb});
        auto res = quad::gauss_kronrod([&](double t) { return cplx(std::abs(dQ(t)), 0.0); }, breaks,
                                       {1e-11 * scale, 1e-10, 400000});
        tv = res.value.real() + tau * std::abs(dQ(pi.a + tau));
    }
    r.delta_bound = (qa + qb + tv) / std::pow(g, m + 1);
    return r;
}

cplx oscillatory_quadrature(const PhaseIntegral& pi, double abs_tol) {
    if (!(pi.b > pi.a)) throw DomainError("oscillatory_quadrature: need a < b");
    const double len = pi.b - pi.a;
    std::vector<double> breaks{pi.a, pi.b};
    for (int j = 1; j <= 30; ++j) breaks.push_back(pi.a + len * std::ldexp(1.0, -j));
    auto step_at = [&](double t) {
        const double slope = std::fabs(pi.gamma * pi.dp(std::min(t, pi.b)));
        return slope > 0.0 ? 2.0 * kPi / slope / 10.0 : len;
    };
    for (double t = pi.a; t < pi.b;) {
        double s = std::min(step_at(t), 0.1 * len);
        s = std::min(s, step_at(t + s));
        t += s;
        if (t < pi.b) breaks.push_back(t);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto f = [&](double t) { return expi(pi.gamma * pi.p(t)) * pi.q(t); };
    // gamma p(t) carries an absolute rounding error of about eps gamma |p|,
    // which puts a floor under any achievable error estimate.
    double pmax = 0.0, qmax = 0.0;
    for (double t : breaks) {
        pmax = std::max(pmax, std::fabs(pi.p(t)));
        qmax = std::max(qmax, std::abs(pi.q(t)));
    }
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * pi.gamma * pmax * len * qmax;
    quad::AdaptiveOptions opt;
    opt.abs_tol = std::max(abs_tol, floor);
    opt.max_intervals = static_cast<int>(std::max<std::size_t>(2'000'000, 4 * breaks.size()));
    return quad::gauss_kronrod(f, breaks, opt).value;
}

namespace {

cplx closed_term(const Vec2& x, const Vec2& zz, double k) {
    if (!(k > 0.0)) throw DomainError("closed form: k must be positive");
    if (!(x.x2 > 0.0)) throw DomainError("closed form: x must lie strictly above the axis (theta in (0, pi))");
    const double r = norm(x);
    const Vec2 xh = x * (1.0 / r);
    return -expi(k * r) / std::sqrt(r) * expi(-0.25 * kPi) * std::sqrt(2.0 * kPi / k) * expi(-k * dot(xh, zz));
}

cplx direction_integral(const Vec2& x, const Vec2& zz, double k) {
    if (!(k > 0.0)) throw DomainError("direction integral: k must be positive");
    const double omega = k * (norm(x) + norm(zz));
    const int panels = std::max(16, static_cast<int>(std::ceil(5.0 * omega)));
    std::vector<double> breaks(panels + 1);
    for (int i = 0; i <= panels; ++i) breaks[i] = kPi + kPi * i / panels;
    auto f = [&](double th) {
        const Vec2 d{std::cos(th), std::sin(th)};
        return expi(k * (dot(x, mirror(d)) - dot(zz, d)));
    };
    return -quad::gauss_kronrod(f, breaks, {1e-13, 0.0, 4'000'000}).value;
}

}  // namespace

cplx u2_closed(const Vec2& x, const Vec2& z, double k) { return closed_term(x, mirror(z), k); }
cplx u3_closed(const Vec2& x, const Vec2& z, double k) { return closed_term(x, z, k); }

cplx u2_quadrature(const Vec2& x, const Vec2& z, double k) { return direction_integral(x, z, k); }
cplx u3_quadrature(const Vec2& x, const Vec2& z, double k) { return direction_integral(x, mirror(z), k); }

cplx u1_asymptotic(const std::vector<cplx>& row, const Vec2& x, const Vec2& z, double k) {
    if (row.empty()) throw DomainError("u1_asymptotic: empty far-field row");
    const double r = norm(x);
    if (!(r > 0.0)) throw DomainError("u1_asymptotic: x must be nonzero");
    const auto dirs = midpoint_directions(row.size());
    cplx sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) sum += row[j] * expi(-k * dot(z, dirs[j].d()));
    return expi(k * r) / std::sqrt(r) * (kPi / static_cast<double>(row.size())) * sum;
}

}  // namespace lrsi
