#include "lrsi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

namespace lrsi::quad {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    if (n == 0) return {1.0, 0.0};
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

Rule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    Rule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        const double dp = legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        const double dp = legendre_with_derivative(n, 0.0).second;
        r.weights[n / 2] = 2.0 / (dp * dp);
    }
    return r;
}

void legendre_values(double x, int n, double* out) {
    if (n <= 0) return;
    out[0] = 1.0;
    if (n == 1) return;
    out[1] = x;
    for (int m = 1; m + 1 < n; ++m) out[m + 1] = ((2.0 * m + 1.0) * x * out[m] - m * out[m - 1]) / (m + 1.0);
}

const PanelRule& PanelRule::instance() {
    static const PanelRule rule;
    return rule;
}

PanelRule::PanelRule() {
    const Rule gl = gauss_legendre(P);
    for (int j = 0; j < P; ++j) {
        nodes_[j] = gl.nodes[j];
        weights_[j] = gl.weights[j];
    }
    // Discrete orthogonality of the Gauss rule gives the inverse directly.
    for (int j = 0; j < P; ++j) {
        double pv[P];
        legendre_values(nodes_[j], P, pv);
        for (int n = 0; n < P; ++n) vinv_[n][j] = 0.5 * (2.0 * n + 1.0) * weights_[j] * pv[n];
    }
}

std::array<double, PanelRule::P> PanelRule::interpolation_weights(double s) const {
    double pv[P];
    legendre_values(s, P, pv);
    std::array<double, P> w{};
    for (int n = 0; n < P; ++n)
        for (int j = 0; j < P; ++j) w[j] += pv[n] * vinv_[n][j];
    return w;
}

std::array<double, PanelRule::P> PanelRule::log_weights(double t) const {
    const auto mu = log_moments(t);
    std::array<double, P> w{};
    for (int n = 0; n < P; ++n)
        for (int j = 0; j < P; ++j) w[j] += mu[n] * vinv_[n][j];
    return w;
}

namespace {

// Composite Gauss rule graded dyadically toward the endpoint nearest t.
std::array<double, PanelRule::P> log_moments_graded(double t) {
    constexpr int P = PanelRule::P;
    const auto& rule = PanelRule::instance();
    const double e = t > 0.0 ? 1.0 : -1.0;
    const double dist = std::fabs(t) - 1.0;
    std::vector<double> edges{-1.0, 1.0};
    double len = 2.0;
    for (int level = 0; level < 60 && len > std::max(dist, 1e-13); ++level) {
        len *= 0.5;
        edges.push_back(e * (1.0 - len));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::array<double, P> mu{};
    double pv[P];
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        const double hw = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int j = 0; j < P; ++j) {
            const double s = mid + hw * rule.nodes()[j];
            const double f = hw * rule.weights()[j] * std::log(std::fabs(t - s));
            legendre_values(s, P, pv);
            for (int n = 0; n < P; ++n) mu[n] += f * pv[n];
        }
    }
    return mu;
}

}  // namespace

std::array<double, PanelRule::P> PanelRule::log_moments(double t) {
    if (std::fabs(t) > 1.0 - 1e-10) return log_moments_graded(t);
    // Legendre functions of the second kind: mu_n = 2(Q_{n+1} - Q_{n-1})/(2n+1).
    double q[P + 2];
    q[0] = 0.5 * std::log((1.0 + t) / (1.0 - t));
    q[1] = t * q[0] - 1.0;
    for (int m = 1; m <= P; ++m) q[m + 1] = ((2.0 * m + 1.0) * t * q[m] - m * q[m - 1]) / (m + 1.0);
    std::array<double, P> mu{};
    mu[0] = (1.0 + t) * std::log(1.0 + t) + (1.0 - t) * std::log(1.0 - t) - 2.0;
    for (int n = 1; n < P; ++n) mu[n] = 2.0 * (q[n + 1] - q[n - 1]) / (2.0 * n + 1.0);
    return mu;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b;
    cplx value;
    double err;
    bool operator<(const Interval& o) const { return err < o.err; }
};

Interval gk15(const ComplexFn& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx k = fc * kWgk[7];
    cplx g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const cplx f1 = f(c - dx), f2 = f(c + dx);
        k += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

AdaptiveResult gauss_kronrod(const ComplexFn& f, const std::vector<double>& breaks,
                             const AdaptiveOptions& opt) {
    if (breaks.size() < 2) throw DomainError("gauss_kronrod: need at least two break points");
    std::priority_queue<Interval> heap;
    cplx total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) throw DomainError("gauss_kronrod: break points must increase");
        auto iv = gk15(f, breaks[i], breaks[i + 1]);
        total += iv.value;
        err += iv.err;
        heap.push(iv);
    }
    int count = static_cast<int>(heap.size());
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    while (err > target() && count < opt.max_intervals) {
        const Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        const auto l = gk15(f, worst.a, mid);
        const auto r = gk15(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // Re-sum to shed the drift of incremental updates.
    cplx sum = 0.0;
    double esum = 0.0;
    std::vector<Interval> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    for (const auto& iv : all) {
        sum += iv.value;
        esum += iv.err;
    }
    return {sum, esum, count, esum <= target()};
}

double gauss_kronrod_real(const RealFn& f, double a, double b, const AdaptiveOptions& opt) {
    if (a == b) return 0.0;
    const double sign = a < b ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    auto r = gauss_kronrod([&](double t) { return cplx(f(t), 0.0); }, {lo, hi}, opt);
    return sign * r.value.real();
}

}  // namespace lrsi::quad
