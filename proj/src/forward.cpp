#include "lrsi/forward.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrsi/parallel.hpp"
#include "lrsi/quadrature.hpp"
#include "lrsi/specialfun.hpp"

namespace lrsi {

namespace {
constexpr int P = quad::PanelRule::P;
}

IncidentDirection::IncidentDirection(double angle) : angle_(angle) {
    if (!std::isfinite(angle) || !(angle > kPi && angle < 2.0 * kPi))
        throw DomainError("incident direction angle must lie in (pi, 2pi)");
    d_ = {std::cos(angle), std::sin(angle)};
}

cplx incident_wave(double k, const Vec2& d, const Vec2& x) { return std::polar(1.0, k * dot(x, d)); }

cplx reflected_wave(double k, const Vec2& d, const Vec2& x) { return -std::polar(1.0, k * dot(x, mirror(d))); }

cplx incident_trace(double k, const Vec2& d, const Vec2& x) {
    if (x.x2 == 0.0) return 0.0;
    return incident_wave(k, d, x) + reflected_wave(k, d, x);
}

cplx incident_trace(const SurfaceProfile& profile, double k, const Vec2& d, double x1) {
    return incident_trace(k, d, Vec2{x1, profile.height(x1)});
}

std::vector<IncidentDirection> midpoint_directions(std::size_t n) {
    std::vector<IncidentDirection> out;
    out.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) out.emplace_back(kPi + kPi * (j - 0.5) / n);
    return out;
}

std::vector<Vec2> midpoint_upper_directions(std::size_t n) {
    std::vector<Vec2> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.push_back(polar(1.0, kPi * (i - 0.5) / n));
    return out;
}

struct ForwardSolver::Impl {
    Eigen::MatrixXcd a;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    std::vector<double> panel_arc;
};

namespace {

struct Geo {
    Vec2 y;
    Vec2 nu;
    double jac;
    double win;
};

// Shared evaluation context for the row builders.
struct Ctx {
    const SurfaceProfile& profile;
    const BoundaryMesh& mesh;
    const HalfPlaneKernel& kernel;
    double eta;
    const std::vector<double>& panel_arc;

    Geo at(double t) const {
        const double h = profile.height_or_flat(t);
        const double d = profile.derivative_or_flat(t);
        const double j = std::sqrt(1.0 + d * d);
        return {{t, h}, {-d / j, 1.0 / j}, j, mesh.window_at(t)};
    }
};

template <int NC>
using KVal = std::array<cplx, NC>;

template <int NC>
void axpy(KVal<NC>& dst, const KVal<NC>& v, double w) {
    for (int c = 0; c < NC; ++c) dst[c] += v[c] * w;
}

double min_node_distance(const Ctx& ctx, const Vec2& x, int q) {
    double d = 1e300;
    for (int j = 0; j < P; ++j) d = std::min(d, norm(x - ctx.mesh.points[q * P + j]));
    return d;
}

// Adds the contribution of panel q to the row for target x (off the panel),
// refining by bisection when x is close.
template <int NC, class KF>
void add_panel(const Ctx& ctx, const Vec2& x, int q, const KF& kf, KVal<NC>* row) {
    const auto& mesh = ctx.mesh;
    const auto& rule = quad::PanelRule::instance();
    const double arc = ctx.panel_arc[q];
    if (min_node_distance(ctx, x, q) > arc) {
        for (int j = 0; j < P; ++j) {
            const std::size_t n = q * P + j;
            axpy<NC>(row[n], kf(x, mesh.points[n], mesh.normals[n]), mesh.weights[n] * mesh.window[n]);
        }
        return;
    }
    const Panel& pan = mesh.panels[q];
    struct Seg {
        double l, r;
    };
    std::vector<Seg> stack{{-1.0, 1.0}};
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const double sub = arc * 0.5 * (s.r - s.l);
        const Geo c = ctx.at(pan.mid() + pan.half() * 0.5 * (s.l + s.r));
        if (norm(x - c.y) < 1.5 * sub && s.r - s.l > 1e-7) {
            const double m = 0.5 * (s.l + s.r);
            stack.push_back({s.l, m});
            stack.push_back({m, s.r});
            continue;
        }
        const double hs = 0.5 * (s.r - s.l), ms = 0.5 * (s.r + s.l);
        for (int m = 0; m < P; ++m) {
            const double sv = ms + hs * rule.nodes()[m];
            const Geo g = ctx.at(pan.mid() + pan.half() * sv);
            const double w = hs * rule.weights()[m] * pan.half() * g.jac * g.win;
            if (w == 0.0) continue;
            const KVal<NC> v = kf(x, g.y, g.nu);
            const auto lw = rule.interpolation_weights(sv);
            for (int j = 0; j < P; ++j) axpy<NC>(row[q * P + j], v, w * lw[j]);
        }
    }
}

// Log-split product integration on panel q for a target on the curve at
// local coordinate tau of that panel. `self` is the node coinciding with the
// target, or -1.
void add_product(const Ctx& ctx, const Vec2& x, double tau, int q, int self, KVal<1>* row) {
    const auto& mesh = ctx.mesh;
    const auto& rule = quad::PanelRule::instance();
    const auto& kernel = ctx.kernel;
    const double k = kernel.k();
    const Panel& pan = mesh.panels[q];
    const auto wlog = rule.log_weights(tau);
    for (int j = 0; j < P; ++j) {
        const std::size_t n = q * P + j;
        const double scale = pan.half() * mesh.jacobian[n] * mesh.window[n];
        if (scale == 0.0) continue;
        cplx a, b;
        if (j == self) {
            const Vec2 xi = kernel.image(x);
            const double ri = norm(x - xi);
            const auto hi = hankel1_01(k * ri);
            const cplx img_s = cplx(0.0, 0.25) * hi.h0;
            const cplx img_d = cplx(0.0, 0.25 * k) * hi.h1 * (dot(x - xi, mirror(mesh.normals[n])) / ri);
            const cplx bs = cplx(0.0, 0.25) - (std::log(0.5 * k) + kEulerGamma) / (2.0 * kPi) -
                            std::log(pan.half() * mesh.jacobian[n]) / (2.0 * kPi) - img_s;
            const cplx bd = mesh.curvature[n] / (4.0 * kPi) - img_d;
            b = bd - cplx(0.0, ctx.eta) * bs;
            a = cplx(0.0, ctx.eta / (2.0 * kPi));
        } else {
            const Vec2& y = mesh.points[n];
            const Vec2& nu = mesh.normals[n];
            a = kernel.combined_log_coefficient(x, y, nu, ctx.eta);
            b = kernel.combined(x, y, nu, ctx.eta) - a * std::log(std::fabs(tau - rule.nodes()[j]));
        }
        row[n][0] += (wlog[j] * a + rule.weights()[j] * b) * scale;
    }
}

}  // namespace

ForwardSolver::ForwardSolver(SurfaceProfile profile, double k, const SolverOptions& opt)
    : profile_(std::move(profile)),
      k_(k),
      eta_(std::max(k, 1.0)),
      opt_(opt),
      mesh_(std::make_shared<BoundaryMesh>(build_mesh(profile_, k, opt.points_per_wavelength,
                                                      opt.margin < 0.0 ? default_margin(k) : opt.margin,
                                                      opt.mesh))),
      kernel_(k, mesh_->image_line),
      axis_kernel_(k, 0.0),
      impl_(std::make_unique<Impl>()) {
    trivial_ = mesh_->flat;
    if (!trivial_) assemble();
}

ForwardSolver::~ForwardSolver() = default;

void ForwardSolver::assemble() {
    const auto& mesh = *mesh_;
    const std::size_t n = mesh.size();
    const int npan = static_cast<int>(mesh.panels.size());
    impl_->panel_arc.assign(npan, 0.0);
    for (std::size_t i = 0; i < n; ++i) impl_->panel_arc[i / P] += mesh.weights[i];

    const Ctx ctx{profile_, mesh, kernel_, eta_, impl_->panel_arc};
    auto kf = [&](const Vec2& x, const Vec2& y, const Vec2& nu) {
        return KVal<1>{kernel_.combined(x, y, nu, eta_)};
    };
    impl_->a.resize(n, n);
    std::vector<KVal<1>> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(row.begin(), row.end(), KVal<1>{0.0});
        const int p = static_cast<int>(i / P);
        const Vec2& x = mesh.points[i];
        for (int q = 0; q < npan; ++q) {
            if (std::abs(q - p) <= 1) {
                const double tau = (mesh.t[i] - mesh.panels[q].mid()) / mesh.panels[q].half();
                add_product(ctx, x, tau, q, q == p ? static_cast<int>(i % P) : -1, row.data());
            } else {
                add_panel<1>(ctx, x, q, kf, row.data());
            }
        }
        row[i][0] += 0.5;
        for (std::size_t j = 0; j < n; ++j) impl_->a(i, j) = row[j][0];
    }
    if (!impl_->a.allFinite()) throw NumericError("forward solver: non-finite matrix entries");
    impl_->lu.compute(impl_->a);
    rcond_ = impl_->lu.rcond();
    if (!(rcond_ > 1e-13)) {
        std::ostringstream msg;
        msg << "forward solver: discrete system is numerically singular (condition estimate "
            << (rcond_ > 0.0 ? 1.0 / rcond_ : INFINITY) << ")";
        throw NumericError(msg.str());
    }
}

std::vector<cplx> ForwardSolver::rhs(const IncidentDirection& d) const {
    std::vector<cplx> b(unknowns());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = -incident_trace(k_, d.d(), mesh_->points[i]);
    return b;
}

LayerDensity ForwardSolver::solve(const IncidentDirection& d) const {
    return solve(std::vector<IncidentDirection>{d}).front();
}

std::vector<LayerDensity> ForwardSolver::solve(const std::vector<IncidentDirection>& ds) const {
    std::vector<LayerDensity> out;
    out.reserve(ds.size());
    if (trivial_) {
        for (const auto& d : ds) out.push_back({mesh_, d, std::vector<cplx>(mesh_->size(), 0.0)});
        return out;
    }
    const std::size_t n = unknowns();
    Eigen::MatrixXcd b(n, ds.size());
    for (std::size_t j = 0; j < ds.size(); ++j) {
        const auto r = rhs(ds[j]);
        for (std::size_t i = 0; i < n; ++i) b(i, j) = r[i];
    }
    const Eigen::MatrixXcd x = impl_->lu.solve(b);
    if (!x.allFinite()) throw NumericError("forward solver: non-finite density");
    for (std::size_t j = 0; j < ds.size(); ++j) {
        LayerDensity dens{mesh_, ds[j], std::vector<cplx>(n)};
        for (std::size_t i = 0; i < n; ++i) dens.values[i] = x(i, j);
        out.push_back(std::move(dens));
    }
    return out;
}

void ForwardSolver::check_density(const LayerDensity& density) const {
    if (density.mesh != mesh_ || density.values.size() != mesh_->size())
        throw ContractError("layer density does not belong to this solver");
}

double ForwardSolver::residual(const LayerDensity& density) const {
    check_density(density);
    if (trivial_) return 0.0;
    const std::size_t n = unknowns();
    Eigen::VectorXcd psi(n);
    for (std::size_t i = 0; i < n; ++i) psi(i) = density.values[i];
    const Eigen::VectorXcd r = impl_->a * psi;
    const auto b = rhs(density.direction);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(r(i) - b[i]));
    return m;
}

cplx ForwardSolver::density_at(const LayerDensity& density, double x1) const {
    check_density(density);
    if (trivial_) return 0.0;
    const int p = mesh_->panel_of(x1);
    if (p < 0) return 0.0;
    const Panel& pan = mesh_->panels[p];
    const auto lw = quad::PanelRule::instance().interpolation_weights((x1 - pan.mid()) / pan.half());
    cplx s = 0.0;
    for (int j = 0; j < P; ++j) s += lw[j] * density.values[p * P + j];
    return s;
}

bool ForwardSolver::classify(const Vec2& x) const {
    if (!std::isfinite(x.x1) || !std::isfinite(x.x2)) throw DomainError("field point must be finite");
    const double h = profile_.height_or_flat(x.x1);
    const double tol = 1e-12 * (1.0 + std::fabs(h));
    if (x.x2 < h - tol) throw DomainError("field point lies below the surface");
    return std::fabs(x.x2 - h) <= tol;
}

std::vector<cplx> ForwardSolver::potential_row(const Vec2& x, bool* near_singular) const {
    std::vector<cplx> out(unknowns(), 0.0);
    if (near_singular) *near_singular = false;
    if (trivial_) return out;
    const Ctx ctx{profile_, *mesh_, kernel_, eta_, impl_->panel_arc};
    std::vector<KVal<1>> row(out.size(), KVal<1>{0.0});
    auto kf = [&](const Vec2& xx, const Vec2& y, const Vec2& nu) {
        return KVal<1>{kernel_.combined(xx, y, nu, eta_)};
    };
    double dmin = 1e300;
    for (int q = 0; q < static_cast<int>(mesh_->panels.size()); ++q) {
        dmin = std::min(dmin, min_node_distance(ctx, x, q));
        add_panel<1>(ctx, x, q, kf, row.data());
    }
    if (near_singular) *near_singular = dmin < mesh_->max_spacing;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = row[i][0];
    return out;
}

std::array<std::vector<cplx>, 2> ForwardSolver::gradient_rows(const Vec2& x) const {
    std::array<std::vector<cplx>, 2> out{std::vector<cplx>(unknowns(), 0.0), std::vector<cplx>(unknowns(), 0.0)};
    if (trivial_) return out;
    const Ctx ctx{profile_, *mesh_, kernel_, eta_, impl_->panel_arc};
    std::vector<KVal<2>> row(unknowns(), KVal<2>{0.0, 0.0});
    auto kf = [&](const Vec2& xx, const Vec2& y, const Vec2& nu) { return kernel_.combined_grad(xx, y, nu, eta_); };
    for (int q = 0; q < static_cast<int>(mesh_->panels.size()); ++q) add_panel<2>(ctx, x, q, kf, row.data());
    for (std::size_t i = 0; i < row.size(); ++i) {
        out[0][i] = row[i][0];
        out[1][i] = row[i][1];
    }
    return out;
}

std::vector<cplx> ForwardSolver::trace_row(double x1) const {
    std::vector<cplx> out(unknowns(), 0.0);
    if (trivial_) return out;
    const Vec2 x{x1, profile_.height_or_flat(x1)};
    const int p = mesh_->panel_of(x1);
    if (p < 0) {
        // Flat line beyond the mesh.
        if (!mesh_->has_tails()) return out;
        return potential_row(x);
    }
    const auto& rule = quad::PanelRule::instance();
    const Ctx ctx{profile_, *mesh_, kernel_, eta_, impl_->panel_arc};
    std::vector<KVal<1>> row(out.size(), KVal<1>{0.0});
    auto kf = [&](const Vec2& xx, const Vec2& y, const Vec2& nu) {
        return KVal<1>{kernel_.combined(xx, y, nu, eta_)};
    };
    const int npan = static_cast<int>(mesh_->panels.size());
    for (int q = 0; q < npan; ++q) {
        if (std::abs(q - p) <= 1) {
            const double tau = (x1 - mesh_->panels[q].mid()) / mesh_->panels[q].half();
            int self = -1;
            if (q == p)
                for (int j = 0; j < P; ++j)
                    if (std::fabs(tau - rule.nodes()[j]) < 1e-14) self = j;
            add_product(ctx, x, tau, q, self, row.data());
        } else {
            add_panel<1>(ctx, x, q, kf, row.data());
        }
    }
    const Panel& pan = mesh_->panels[p];
    const auto lw = rule.interpolation_weights((x1 - pan.mid()) / pan.half());
    for (int j = 0; j < P; ++j) row[p * P + j][0] += 0.5 * lw[j];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = row[i][0];
    return out;
}

std::vector<cplx> ForwardSolver::far_row(const Vec2& xhat) const {
    std::vector<cplx> out(unknowns(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = kernel_.combined_far(xhat, mesh_->points[i], mesh_->normals[i], eta_) *
                 (mesh_->weights[i] * mesh_->window[i]);
    return out;
}

const ForwardSolver::Sigma& ForwardSolver::sigma() const {
    std::call_once(sigma_once_, [this] {
        auto s = std::make_unique<Sigma>();
        if (uses_sigma()) {
            const auto supp = profile_.support();
            double rmax = std::max(std::fabs(supp.lo), std::fabs(supp.hi));
            const int samples = 2000;
            for (int i = 0; i <= samples; ++i) {
                const double x = supp.lo + supp.length() * i / samples;
                rmax = std::max(rmax, std::hypot(x, profile_.height_or_flat(x)));
            }
            const double lambda = 2.0 * kPi / k_;
            s->radius = rmax + std::max(0.5 * lambda, 0.1);
            const int ns = static_cast<int>(std::ceil(2.0 * k_ * s->radius)) + 60;
            const auto gl = quad::gauss_legendre(ns);
            for (int l = 0; l < ns; ++l) {
                const double th = 0.5 * kPi * (gl.nodes[l] + 1.0);
                s->nodes.push_back(polar(s->radius, th));
                s->weights.push_back(0.5 * kPi * gl.weights[l] * s->radius);
            }
            const std::size_t n = unknowns();
            s->value_rows = simd::SplitMatrix(ns, n);
            s->normal_rows = simd::SplitMatrix(ns, n);
            parallel_for(ns, opt_.threads, [&](std::size_t l) {
                const Vec2 y = s->nodes[l];
                const Vec2 nr = y * (1.0 / s->radius);
                const auto v = potential_row(y);
                const auto g = gradient_rows(y);
                for (std::size_t i = 0; i < n; ++i) {
                    s->value_rows.set(l, i, v[i]);
                    s->normal_rows.set(l, i, g[0][i] * nr.x1 + g[1][i] * nr.x2);
                }
            });
        }
        sigma_ = std::move(s);
    });
    return *sigma_;
}

double ForwardSolver::sigma_threshold() const {
    if (!uses_sigma()) return INFINITY;
    return 1.5 * sigma().radius + 2.0 * kPi / k_;
}

std::vector<cplx> ForwardSolver::sigma_field_row(const Vec2& x) const {
    const auto& s = sigma();
    const std::size_t ns = s.nodes.size();
    std::vector<cplx> row(2 * ns);
    for (std::size_t l = 0; l < ns; ++l) {
        const Vec2 nr = s.nodes[l] * (1.0 / s.radius);
        row[l] = s.weights[l] * axis_kernel_.double_layer(x, s.nodes[l], nr);
        row[ns + l] = -s.weights[l] * axis_kernel_.green(x, s.nodes[l]);
    }
    return row;
}

std::vector<cplx> ForwardSolver::sigma_far_row(const Vec2& xhat) const {
    const auto& s = sigma();
    const std::size_t ns = s.nodes.size();
    std::vector<cplx> row(2 * ns);
    for (std::size_t l = 0; l < ns; ++l) {
        const Vec2 nr = s.nodes[l] * (1.0 / s.radius);
        row[l] = s.weights[l] * axis_kernel_.combined_far(xhat, s.nodes[l], nr, 0.0);
        row[ns + l] = -s.weights[l] * axis_kernel_.green_far(xhat, s.nodes[l]);
    }
    return row;
}

namespace {

cplx dot_row(const std::vector<cplx>& row, const std::vector<cplx>& v) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * v[i];
    return s;
}

Vec2 checked_far_direction(const Vec2& xhat) {
    const double n = norm(xhat);
    if (!std::isfinite(n) || std::fabs(n - 1.0) > 1e-6) throw DomainError("observation direction must be a unit vector");
    if (!(xhat.x2 > 0.0)) throw DomainError("observation direction must lie in the upper half circle");
    return xhat * (1.0 / n);
}

// u and d_r u on the semicircle for one density.
std::vector<cplx> sigma_data(const ForwardSolver::Sigma& s, const std::vector<cplx>& psi) {
    const std::size_t ns = s.nodes.size();
    std::vector<cplx> out(2 * ns);
    for (std::size_t l = 0; l < ns; ++l) {
        cplx a = 0.0, b = 0.0;
        const double* vr = s.value_rows.re_row(l);
        const double* vi = s.value_rows.im_row(l);
        const double* nr = s.normal_rows.re_row(l);
        const double* ni = s.normal_rows.im_row(l);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            a += cplx(vr[i], vi[i]) * psi[i];
            b += cplx(nr[i], ni[i]) * psi[i];
        }
        out[l] = a;
        out[ns + l] = b;
    }
    return out;
}

}  // namespace

FieldValue ForwardSolver::scattered_near(const LayerDensity& density, const Vec2& x) const {
    check_density(density);
    const bool on_curve = classify(x);
    if (trivial_) return {0.0, false};
    if (on_curve) return {boundary_trace(density, x.x1), true};
    if (uses_sigma() && norm(x) >= sigma_threshold())
        return {dot_row(sigma_field_row(x), sigma_data(sigma(), density.values)), false};
    bool near = false;
    const auto row = potential_row(x, &near);
    return {dot_row(row, density.values), near};
}

cplx ForwardSolver::boundary_trace(const LayerDensity& density, double x1) const {
    check_density(density);
    if (trivial_) return 0.0;
    return dot_row(trace_row(x1), density.values);
}

cplx ForwardSolver::far_field(const LayerDensity& density, const Vec2& xhat_in) const {
    check_density(density);
    const Vec2 xhat = checked_far_direction(xhat_in);
    if (trivial_) return 0.0;
    if (uses_sigma()) return dot_row(sigma_far_row(xhat), sigma_data(sigma(), density.values));
    return dot_row(far_row(xhat), density.values);
}

double ForwardSolver::total_field_magnitude(const LayerDensity& density, const Vec2& x) const {
    const cplx us = scattered_near(density, x).value;
    return std::abs(incident_trace(k_, density.direction.d(), x) + us);
}

// ---------------------------------------------------------------------------

ScatteringState::ScatteringState(std::shared_ptr<const ForwardSolver> solver,
                                 std::vector<IncidentDirection> directions, int threads)
    : solver_(std::move(solver)), dirs_(std::move(directions)), threads_(resolve_threads(threads)) {
    if (!solver_) throw ContractError("ScatteringState needs a solver");
    const std::size_t n = solver_->unknowns();
    const std::size_t nd = dirs_.size();
    psi_ = simd::SplitMatrix(n, nd);
    if (solver_->trivial() || nd == 0) return;
    const auto dens = solver_->solve(dirs_);
    for (std::size_t j = 0; j < nd; ++j)
        for (std::size_t i = 0; i < n; ++i) psi_.set(i, j, dens[j].values[i]);
    if (solver_->uses_sigma()) {
        const auto& s = solver_->sigma();
        const std::size_t ns = s.nodes.size();
        sigma_ = simd::SplitMatrix(2 * ns, nd);
        simd::SplitView top{sigma_.re_row(0), sigma_.im_row(0), ns, nd, nd};
        simd::SplitView bottom{sigma_.re_row(ns), sigma_.im_row(ns), ns, nd, nd};
        simd::cgemm(s.value_rows.view(), psi_.view(), top);
        simd::cgemm(s.normal_rows.view(), psi_.view(), bottom);
    }
}

LayerDensity ScatteringState::density(std::size_t j) const {
    LayerDensity d{solver_->mesh_ptr(), dirs_.at(j), std::vector<cplx>(psi_.rows())};
    for (std::size_t i = 0; i < psi_.rows(); ++i) d.values[i] = psi_.get(i, j);
    return d;
}

namespace {

// Evaluates rows for a set of points in blocks and multiplies by `rhs`.
template <class RowFn>
void apply_rows(const std::vector<std::size_t>& idx, std::size_t width, const simd::SplitMatrix& rhs,
                int threads, const RowFn& row_fn, simd::SplitMatrix& out) {
    const std::size_t block = 128;
    const std::size_t nd = rhs.cols();
    for (std::size_t start = 0; start < idx.size(); start += block) {
        const std::size_t count = std::min(block, idx.size() - start);
        simd::SplitMatrix rows(count, width);
        parallel_for(count, threads, [&](std::size_t r) {
            const auto row = row_fn(idx[start + r]);
            for (std::size_t c = 0; c < width; ++c) rows.set(r, c, row[c]);
        });
        simd::SplitMatrix res(count, nd);
        simd::cgemm(rows.view(), rhs.view(), res.view());
        for (std::size_t r = 0; r < count; ++r)
            for (std::size_t j = 0; j < nd; ++j) out.set(idx[start + r], j, res.get(r, j));
    }
}

}  // namespace

simd::SplitMatrix ScatteringState::scattered(const std::vector<Vec2>& xs) const {
    simd::SplitMatrix out(xs.size(), dirs_.size());
    std::vector<std::size_t> on_curve, far, direct;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const bool on = solver_->classify(xs[i]);
        if (solver_->trivial()) continue;
        if (on) on_curve.push_back(i);
        else if (solver_->uses_sigma() && norm(xs[i]) >= solver_->sigma_threshold()) far.push_back(i);
        else direct.push_back(i);
    }
    if (solver_->trivial() || dirs_.empty()) return out;
    const std::size_t n = solver_->unknowns();
    apply_rows(on_curve, n, psi_, threads_, [&](std::size_t i) { return solver_->trace_row(xs[i].x1); }, out);
    apply_rows(direct, n, psi_, threads_, [&](std::size_t i) { return solver_->potential_row(xs[i]); }, out);
    if (!far.empty())
        apply_rows(far, sigma_.rows(), sigma_, threads_, [&](std::size_t i) { return solver_->sigma_field_row(xs[i]); },
                   out);
    return out;
}

std::vector<cplx> ScatteringState::scattered_at(const Vec2& x) const {
    const auto m = scattered({x});
    std::vector<cplx> out(dirs_.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = m.get(0, j);
    return out;
}

std::vector<cplx> ScatteringState::boundary_trace(double x1) const {
    std::vector<cplx> out(dirs_.size(), 0.0);
    if (solver_->trivial()) return out;
    const auto row = solver_->trace_row(x1);
    for (std::size_t j = 0; j < out.size(); ++j) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * psi_.get(i, j);
        out[j] = s;
    }
    return out;
}

simd::SplitMatrix ScatteringState::far_field(const std::vector<Vec2>& xhats) const {
    std::vector<Vec2> dirs;
    dirs.reserve(xhats.size());
    for (const auto& x : xhats) dirs.push_back(checked_far_direction(x));
    simd::SplitMatrix out(xhats.size(), dirs_.size());
    if (solver_->trivial() || dirs_.empty()) return out;
    std::vector<std::size_t> idx(dirs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (solver_->uses_sigma())
        apply_rows(idx, sigma_.rows(), sigma_, threads_, [&](std::size_t i) { return solver_->sigma_far_row(dirs[i]); },
                   out);
    else
        apply_rows(idx, solver_->unknowns(), psi_, threads_, [&](std::size_t i) { return solver_->far_row(dirs[i]); },
                   out);
    return out;
}

}  // namespace lrsi
