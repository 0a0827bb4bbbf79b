#include "lrsi/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lrsi {

const char* kind_name(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::flat: return "flat";
        case ProfileKind::spline_bumps: return "spline_bumps";
        case ProfileKind::piecewise_linear: return "piecewise_linear";
        case ProfileKind::multiscale: return "multiscale";
        case ProfileKind::tabulated: return "tabulated";
    }
    return "unknown";
}

ProfileKind kind_from_name(const std::string& name) {
    for (auto k : {ProfileKind::flat, ProfileKind::spline_bumps, ProfileKind::piecewise_linear,
                   ProfileKind::multiscale, ProfileKind::tabulated})
        if (name == kind_name(k)) return k;
    throw DomainError("unknown profile kind: " + name);
}

namespace {

// Sum of the truncated powers for x <= 0, where at most three terms are active.
double bspline_left(double x, int order) {
    static const double binom[6] = {1, 5, 10, 10, 5, 1};
    double s = 0.0;
    for (int j = 0; j <= 5; ++j) {
        const double u = x + 2.5 - j;
        if (u <= 0.0) break;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        double term = 0.0;
        switch (order) {
            case 0: term = u * u * u * u / 24.0; break;
            case 1: term = u * u * u / 6.0; break;
            default: term = u * u / 2.0; break;
        }
        s += sign * binom[j] * term;
    }
    return s;
}

}  // namespace

// The spline is even, so evaluate on the left half where fewer terms cancel.
double bspline4(double x) {
    if (std::fabs(x) >= 2.5) return 0.0;
    return bspline_left(-std::fabs(x), 0);
}
double bspline4_d1(double x) {
    if (std::fabs(x) >= 2.5) return 0.0;
    const double v = bspline_left(-std::fabs(x), 1);
    return x > 0.0 ? -v : v;
}
double bspline4_d2(double x) {
    if (std::fabs(x) >= 2.5) return 0.0;
    return bspline_left(-std::fabs(x), 2);
}

SurfaceProfile SurfaceProfile::flat() {
    SurfaceProfile p;
    p.kind_ = ProfileKind::flat;
    p.finalize();
    return p;
}

SurfaceProfile SurfaceProfile::spline_bumps(std::vector<Bump> bumps) {
    for (const auto& b : bumps)
        if (!(b.width > 0.0) || !std::isfinite(b.amplitude) || !std::isfinite(b.center))
            throw DomainError("spline bump needs finite amplitude/center and width > 0");
    SurfaceProfile p;
    p.kind_ = ProfileKind::spline_bumps;
    p.bumps_ = std::move(bumps);
    p.finalize();
    return p;
}

SurfaceProfile SurfaceProfile::piecewise_linear(std::vector<Vec2> nodes) {
    if (nodes.size() < 2) throw DomainError("piecewise_linear needs at least two nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i].x1) || !std::isfinite(nodes[i].x2))
            throw DomainError("piecewise_linear: non-finite node");
        if (i > 0 && !(nodes[i].x1 > nodes[i - 1].x1))
            throw DomainError("piecewise_linear: node abscissae must increase");
    }
    SurfaceProfile p;
    p.kind_ = ProfileKind::piecewise_linear;
    p.nodes_ = std::move(nodes);
    p.finalize();
    return p;
}

SurfaceProfile SurfaceProfile::multiscale(const MultiscaleParams& ms) {
    if (!(ms.half_width > 0.0)) throw DomainError("multiscale: half_width must be > 0");
    SurfaceProfile p;
    p.kind_ = ProfileKind::multiscale;
    p.ms_ = ms;
    p.finalize();
    return p;
}

SurfaceProfile SurfaceProfile::tabulated(std::vector<double> x, std::vector<double> h, int order) {
    if (x.size() != h.size() || x.size() < 2) throw DomainError("tabulated: need >= 2 matching samples");
    if (order != 1 && order != 3) throw DomainError("tabulated: interpolation order must be 1 or 3");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(h[i])) throw DomainError("tabulated: non-finite sample");
        if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("tabulated: abscissae must increase");
    }
    SurfaceProfile p;
    p.kind_ = ProfileKind::tabulated;
    p.tx_ = std::move(x);
    p.th_ = std::move(h);
    p.order_ = order;
    const std::size_t n = p.tx_.size();
    p.tm_.assign(n, 0.0);
    if (order == 3 && n > 2) {
        // Natural spline: tridiagonal system for the second derivatives.
        std::vector<double> diag(n, 1.0), rhs(n, 0.0), upper(n, 0.0), lower(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = p.tx_[i] - p.tx_[i - 1], hr = p.tx_[i + 1] - p.tx_[i];
            lower[i] = hl / 6.0;
            diag[i] = (hl + hr) / 3.0;
            upper[i] = hr / 6.0;
            rhs[i] = (p.th_[i + 1] - p.th_[i]) / hr - (p.th_[i] - p.th_[i - 1]) / hl;
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        p.tm_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) p.tm_[i] = (rhs[i] - upper[i] * p.tm_[i + 1]) / diag[i];
    }
    p.finalize();
    return p;
}

SurfaceProfile SurfaceProfile::tabulated_csv(const std::string& path, int order) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open profile table: " + path);
    std::vector<double> xs, hs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x = 0.0, h = 0.0;
        if (!(ss >> x >> h)) {
            // tolerate a single header row
            if (xs.empty() && lineno == 1) continue;
            throw ParseError("profile table: expected two numbers", lineno);
        }
        xs.push_back(x);
        hs.push_back(h);
    }
    return tabulated(std::move(xs), std::move(hs), order);
}

SurfaceProfile SurfaceProfile::example1() {
    return spline_bumps({{0.1, -0.2, 0.3}, {-0.08, 0.3, 0.2}});
}

SurfaceProfile SurfaceProfile::example2() {
    return piecewise_linear({{-0.5, 0.0}, {0.0, 0.2}, {0.5, 0.0}});
}

SurfaceProfile SurfaceProfile::example3() { return multiscale(MultiscaleParams{}); }

std::size_t SurfaceProfile::table_segment(double x1) const {
    auto it = std::upper_bound(tx_.begin(), tx_.end(), x1);
    std::size_t i = static_cast<std::size_t>(it - tx_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, tx_.size() - 2);
}

double SurfaceProfile::raw(double x, int order) const {
    switch (kind_) {
        case ProfileKind::flat:
            return 0.0;
        case ProfileKind::spline_bumps: {
            double s = 0.0;
            for (const auto& b : bumps_) {
                const double u = (x - b.center) / b.width;
                if (order == 0) s += b.amplitude * bspline4(u);
                else if (order == 1) s += b.amplitude * bspline4_d1(u) / b.width;
                else s += b.amplitude * bspline4_d2(u) / (b.width * b.width);
            }
            return s;
        }
        case ProfileKind::piecewise_linear: {
            if (x < nodes_.front().x1 || x >= nodes_.back().x1) {
                if (order == 0 && x == nodes_.back().x1) return nodes_.back().x2;
                return 0.0;
            }
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                       [](double v, const Vec2& n) { return v < n.x1; });
            const Vec2& r = *it;
            const Vec2& l = *(it - 1);
            const double slope = (r.x2 - l.x2) / (r.x1 - l.x1);
            if (order == 0) return l.x2 + slope * (x - l.x1);
            return order == 1 ? slope : 0.0;
        }
        case ProfileKind::multiscale: {
            const double w = ms_.half_width;
            if (std::fabs(x) >= w) return 0.0;
            const double den = x * x - w * w;
            const double g = w * w / den;
            const double e = std::exp(g);
            if (e == 0.0) return 0.0;
            const double s = ms_.base + ms_.ripple * std::sin(ms_.ripple_frequency * x);
            const double t = std::sin(ms_.frequency * x);
            if (order == 0) return ms_.amplitude * e * s * t;
            const double g1 = -2.0 * w * w * x / (den * den);
            const double e1 = g1 * e;
            const double s1 = ms_.ripple * ms_.ripple_frequency * std::cos(ms_.ripple_frequency * x);
            const double t1 = ms_.frequency * std::cos(ms_.frequency * x);
            if (order == 1) return ms_.amplitude * (e1 * s * t + e * s1 * t + e * s * t1);
            const double g2 = 2.0 * w * w * (3.0 * x * x + w * w) / (den * den * den);
            const double e2 = (g2 + g1 * g1) * e;
            const double s2 = -ms_.ripple * ms_.ripple_frequency * ms_.ripple_frequency *
                              std::sin(ms_.ripple_frequency * x);
            const double t2 = -ms_.frequency * ms_.frequency * t;
            return ms_.amplitude * (e2 * s * t + e * s2 * t + e * s * t2 + 2.0 * e1 * s1 * t +
                                    2.0 * e1 * s * t1 + 2.0 * e * s1 * t1);
        }
        case ProfileKind::tabulated: {
            const std::size_t i = table_segment(x);
            const double x0 = tx_[i], x1 = tx_[i + 1];
            const double hseg = x1 - x0;
            const double y0 = th_[i], y1 = th_[i + 1];
            if (order_ == 1) {
                if (order == 0) return y0 + (y1 - y0) * (x - x0) / hseg;
                return order == 1 ? (y1 - y0) / hseg : 0.0;
            }
            const double a = (x1 - x) / hseg, b = (x - x0) / hseg;
            const double m0 = tm_[i], m1 = tm_[i + 1];
            if (order == 0) return a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * hseg * hseg / 6.0;
            if (order == 1)
                return (y1 - y0) / hseg - (3.0 * a * a - 1.0) / 6.0 * hseg * m0 + (3.0 * b * b - 1.0) / 6.0 * hseg * m1;
            return a * m0 + b * m1;
        }
    }
    return 0.0;
}

bool SurfaceProfile::covers(double x1) const {
    if (kind_ != ProfileKind::tabulated) return std::isfinite(x1);
    return x1 >= tx_.front() && x1 <= tx_.back();
}

static void check_query(const SurfaceProfile& p, double x1) {
    if (!std::isfinite(x1)) throw DomainError("surface: non-finite abscissa");
    if (!p.covers(x1)) throw DomainError("surface: abscissa outside the tabulated range");
}

double SurfaceProfile::height(double x1) const {
    check_query(*this, x1);
    return raw(x1, 0);
}
double SurfaceProfile::derivative(double x1) const {
    check_query(*this, x1);
    return raw(x1, 1);
}
double SurfaceProfile::second_derivative(double x1) const {
    check_query(*this, x1);
    return raw(x1, 2);
}
double SurfaceProfile::height_or_flat(double x1) const { return covers(x1) ? raw(x1, 0) : 0.0; }
double SurfaceProfile::derivative_or_flat(double x1) const { return covers(x1) ? raw(x1, 1) : 0.0; }
double SurfaceProfile::second_derivative_or_flat(double x1) const { return covers(x1) ? raw(x1, 2) : 0.0; }

void SurfaceProfile::finalize() {
    breaks_.clear();
    corners_.clear();
    flat_ = true;
    support_ = {0.0, 0.0};
    switch (kind_) {
        case ProfileKind::flat:
            break;
        case ProfileKind::spline_bumps: {
            bool first = true;
            for (const auto& b : bumps_) {
                if (b.amplitude == 0.0) continue;
                const double lo = b.center - 2.5 * b.width, hi = b.center + 2.5 * b.width;
                support_ = first ? Interval{lo, hi} : Interval{std::min(support_.lo, lo), std::max(support_.hi, hi)};
                first = false;
                flat_ = false;
                for (int j = 0; j <= 5; ++j) breaks_.push_back(b.center + (j - 2.5) * b.width);
            }
            break;
        }
        case ProfileKind::piecewise_linear: {
            const std::size_t n = nodes_.size();
            std::size_t first = n, last = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (nodes_[i].x2 != 0.0) {
                    first = std::min(first, i);
                    last = i;
                }
            if (first < n) {
                flat_ = false;
                support_ = {nodes_[first > 0 ? first - 1 : 0].x1, nodes_[last + 1 < n ? last + 1 : n - 1].x1};
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double left = i == 0 ? 0.0 : (nodes_[i].x2 - nodes_[i - 1].x2) / (nodes_[i].x1 - nodes_[i - 1].x1);
                const double right = i + 1 == n ? 0.0 : (nodes_[i + 1].x2 - nodes_[i].x2) / (nodes_[i + 1].x1 - nodes_[i].x1);
                breaks_.push_back(nodes_[i].x1);
                if (left != right) corners_.push_back(nodes_[i].x1);
            }
            break;
        }
        case ProfileKind::multiscale: {
            const bool zero = ms_.amplitude == 0.0 || (ms_.base == 0.0 && ms_.ripple == 0.0) || ms_.frequency == 0.0;
            if (!zero) {
                flat_ = false;
                support_ = {-ms_.half_width, ms_.half_width};
                breaks_ = {-ms_.half_width, ms_.half_width};
            }
            break;
        }
        case ProfileKind::tabulated: {
            const std::size_t n = tx_.size();
            std::size_t first = n, last = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (th_[i] != 0.0) {
                    first = std::min(first, i);
                    last = i;
                }
            if (first < n) {
                flat_ = false;
                if (order_ == 1)
                    support_ = {tx_[first > 0 ? first - 1 : 0], tx_[last + 1 < n ? last + 1 : n - 1]};
                else
                    support_ = {tx_.front(), tx_.back()};  // spline may ring between zero samples
            }
            breaks_ = {tx_.front(), tx_.back()};
            if (order_ == 1) {
                breaks_ = tx_;
                for (std::size_t i = 0; i < n; ++i) {
                    const double left = i == 0 ? 0.0 : (th_[i] - th_[i - 1]) / (tx_[i] - tx_[i - 1]);
                    const double right = i + 1 == n ? 0.0 : (th_[i + 1] - th_[i]) / (tx_[i + 1] - tx_[i]);
                    if (left != right) corners_.push_back(tx_[i]);
                }
            }
            break;
        }
    }
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());

    hmin_ = hmax_ = 0.0;
    if (!flat_) {
        const int samples = 8000;
        auto visit = [&](double x) {
            const double h = height_or_flat(x);
            hmin_ = std::min(hmin_, h);
            hmax_ = std::max(hmax_, h);
        };
        for (int i = 0; i <= samples; ++i) visit(support_.lo + support_.length() * i / samples);
        for (double b : breaks_) visit(b);
    }
}

}  // namespace lrsi
