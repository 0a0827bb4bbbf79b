#include <algorithm>
#include <cmath>

#include "lrsi/quadrature.hpp"
#include "lrsi/surface.hpp"

namespace lrsi {

double smooth_window(double x1, const Interval& range, double taper) {
    if (!(taper > 0.0)) return 1.0;
    // exp(2 e^{-1/u} / (u - 1)): 1 at u = 0, 0 at u = 1, all derivatives vanish at both ends.
    auto ramp = [](double u) {
        if (u <= 0.0) return 1.0;
        if (u >= 1.0) return 0.0;
        return std::exp(2.0 * std::exp(-1.0 / u) / (u - 1.0));
    };
    const double ul = (range.lo + taper - x1) / taper;
    const double ur = (x1 - (range.hi - taper)) / taper;
    return std::min(ramp(ul), ramp(ur));
}

double BoundaryMesh::arc_length() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double BoundaryMesh::window_at(double x1) const { return smooth_window(x1, range, taper); }

int BoundaryMesh::panel_of(double x1) const {
    if (panels.empty() || x1 < panels.front().t0 || x1 > panels.back().t1) return -1;
    auto it = std::lower_bound(panels.begin(), panels.end(), x1,
                               [](const Panel& p, double v) { return p.t1 < v; });
    if (it == panels.end()) --it;
    return static_cast<int>(it - panels.begin());
}

namespace {

// Largest gap between consecutive Gauss nodes as a fraction of the panel length.
double gauss_gap_fraction() {
    const auto& r = quad::PanelRule::instance();
    double g = 0.0;
    for (int j = 0; j + 1 < quad::PanelRule::P; ++j) g = std::max(g, 0.5 * (r.nodes()[j + 1] - r.nodes()[j]));
    return g;
}

double max_jacobian(const SurfaceProfile& profile, double lo, double hi) {
    double jm = 1.0;
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double d = profile.derivative_or_flat(x);
        jm = std::max(jm, std::sqrt(1.0 + d * d));
    }
    return jm;
}

void grade_toward(std::vector<Panel>& out, double from, double to, int levels) {
    // Panel [from, to] split dyadically so the smallest piece touches `from`.
    std::vector<double> cuts{from};
    for (int l = levels; l >= 1; --l) cuts.push_back(from + (to - from) / std::ldexp(1.0, l));
    cuts.push_back(to);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = std::min(cuts[i], cuts[i + 1]), b = std::max(cuts[i], cuts[i + 1]);
        out.push_back({a, b});
    }
}

}  // namespace

BoundaryMesh build_mesh(const SurfaceProfile& profile, double k, double ppw, double margin,
                        const MeshOptions& opt) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("build_mesh: k must be positive");
    if (!(ppw >= 6.0) || !std::isfinite(ppw))
        throw DomainError("build_mesh: mesh too coarse, points per wavelength must be >= 6");
    if (!(margin >= 0.0) || !std::isfinite(margin)) throw DomainError("build_mesh: margin must be >= 0");

    BoundaryMesh mesh;
    mesh.k = k;
    mesh.points_per_wavelength = ppw;
    mesh.margin = margin;
    mesh.flat = profile.is_flat();
    const double lambda = 2.0 * kPi / k;

    if (mesh.flat && margin == 0.0) {
        mesh.degenerate = true;
        mesh.range = {0.0, 0.0};
        for (int i = 0; i < 2; ++i) {
            mesh.t.push_back(0.0);
            mesh.points.push_back({0.0, 0.0});
            mesh.normals.push_back({0.0, 1.0});
            mesh.weights.push_back(0.0);
            mesh.jacobian.push_back(1.0);
            mesh.curvature.push_back(0.0);
            mesh.window.push_back(1.0);
        }
        return mesh;
    }

    const Interval supp = profile.support();
    if (!mesh.flat) {
        const double eps = 1e-9 * std::max(1.0, supp.length());
        if (std::fabs(profile.height_or_flat(supp.lo)) > eps || std::fabs(profile.height_or_flat(supp.hi)) > eps)
            throw DomainError("build_mesh: profile must meet the flat line continuously");
    }
    Interval range{supp.lo - margin, supp.hi + margin};
    if (!mesh.flat) {
        const double tail = opt.tail_wavelengths * lambda;
        range.lo -= tail;
        range.hi += tail;
        mesh.taper = 0.5 * tail;
        mesh.image_line = std::min(profile.min_height(), 0.0) - opt.image_offset_wavelengths * lambda;
    }
    mesh.range = range;

    std::vector<double> breaks{range.lo, range.hi};
    for (double b : profile.breakpoints())
        if (b > range.lo && b < range.hi) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    {
        std::vector<double> merged;
        for (double b : breaks)
            if (merged.empty() || b - merged.back() > 1e-12) merged.push_back(b);
        breaks = merged;
    }
    const auto& corners = profile.corners();
    auto is_corner = [&](double x) {
        return std::any_of(corners.begin(), corners.end(), [&](double c) { return std::fabs(c - x) <= 1e-12; });
    };

    const double gap = gauss_gap_fraction();
    const double cap = 5.0 * lambda / ppw;
    std::vector<Panel> panels;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double lo = breaks[s], hi = breaks[s + 1];
        const double jm = max_jacobian(profile, lo, hi);
        const double len = std::min(cap, lambda / (ppw * gap * jm * 1.02));
        const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / len - 1e-9)));
        const double step = (hi - lo) / n;
        for (int i = 0; i < n; ++i) {
            const double a = lo + i * step, b = (i + 1 == n) ? hi : lo + (i + 1) * step;
            const bool left_corner = i == 0 && is_corner(lo);
            const bool right_corner = i + 1 == n && is_corner(hi);
            if (left_corner && right_corner) {
                const double m = 0.5 * (a + b);
                grade_toward(panels, a, m, opt.corner_levels);
                std::vector<Panel> tmp;
                grade_toward(tmp, b, m, opt.corner_levels);
                std::reverse(tmp.begin(), tmp.end());
                panels.insert(panels.end(), tmp.begin(), tmp.end());
            } else if (left_corner) {
                grade_toward(panels, a, b, opt.corner_levels);
            } else if (right_corner) {
                std::vector<Panel> tmp;
                grade_toward(tmp, b, a, opt.corner_levels);
                std::reverse(tmp.begin(), tmp.end());
                panels.insert(panels.end(), tmp.begin(), tmp.end());
            } else {
                panels.push_back({a, b});
            }
        }
    }
    mesh.panels = panels;

    const auto& rule = quad::PanelRule::instance();
    const std::size_t n = panels.size() * quad::PanelRule::P;
    mesh.t.reserve(n);
    for (const auto& p : panels) {
        for (int j = 0; j < quad::PanelRule::P; ++j) {
            const double x = p.mid() + p.half() * rule.nodes()[j];
            const double h = profile.height_or_flat(x);
            const double d = profile.derivative_or_flat(x);
            const double dd = profile.second_derivative_or_flat(x);
            const double jac = std::sqrt(1.0 + d * d);
            mesh.t.push_back(x);
            mesh.points.push_back({x, h});
            mesh.normals.push_back({-d / jac, 1.0 / jac});
            mesh.jacobian.push_back(jac);
            mesh.weights.push_back(p.half() * rule.weights()[j] * jac);
            mesh.curvature.push_back(dd / (jac * jac * jac));
            mesh.window.push_back(smooth_window(x, range, mesh.taper));
        }
    }
    for (std::size_t i = 0; i + 1 < mesh.points.size(); ++i)
        mesh.max_spacing = std::max(mesh.max_spacing, norm(mesh.points[i + 1] - mesh.points[i]));
    return mesh;
}

}  // namespace lrsi
