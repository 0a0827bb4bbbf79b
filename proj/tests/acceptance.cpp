// Runs the acceptance criteria and prints one PASS/FAIL line for each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lrsi/asymptotics.hpp"
#include "lrsi/dataset.hpp"
#include "lrsi/forward.hpp"
#include "lrsi/imaging.hpp"

using namespace lrsi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

constexpr std::uint64_t kSeed = 20240601;

// Sampling points a little above the Example 1 surface.
std::vector<Vec2> near_surface_points(const SurfaceProfile& h) {
    std::vector<Vec2> zs;
    for (double x1 : {-0.6, -0.3, 0.0, 0.3, 0.6}) zs.push_back({x1, h.height(x1) + 0.05});
    return zs;
}

Outcome flat_surface() {
    const double k = 10.0;
    const MeasurementConfig mc{k, 3.0, 64, 64, 64};
    const auto flat = SurfaceProfile::flat();
    const auto pl = synthesize_phaseless(flat, mc);
    const auto ff = synthesize_farfield(flat, mc);
    double ff_max = 0.0, pl_err = 0.0;
    for (const auto& v : ff.values) ff_max = std::max(ff_max, std::abs(v));
    const auto xs = mc.receivers();
    const auto ds = mc.directions();
    for (std::size_t i = 0; i < mc.M; ++i)
        for (std::size_t j = 0; j < mc.N; ++j)
            pl_err = std::max(pl_err, std::fabs(pl.at(i, j) - 2.0 * std::fabs(std::sin(k * xs[i].x2 * ds[j].d().x2))));
    return {ff_max <= 1e-10 && pl_err <= 1e-10, "max|u_inf| = " + fmt(ff_max) + ", phaseless error = " + fmt(pl_err)};
}

Outcome reciprocity() {
    const MeasurementConfig mc{10.0, 0.0, 0, 32, 32};
    const auto ff = synthesize_farfield(SurfaceProfile::example1(), mc);
    // Observation i is the reversal of direction i on the midpoint grids.
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j) {
            scale = std::max(scale, std::abs(ff.at(i, j)));
            err = std::max(err, std::abs(ff.at(i, j) - ff.at(j, i)));
        }
    return {err / scale <= 1e-3, "max relative mismatch = " + fmt(err / scale)};
}

Outcome boundary_identity() {
    const double k = 10.0;
    auto solver = std::make_shared<ForwardSolver>(SurfaceProfile::example1(), k);
    auto worst_for = [&](std::size_t n) {
        ScatteringState st(solver, midpoint_directions(n));
        double worst = 0.0;
        for (int p = 0; p < 10; ++p) {
            const double x1 = -0.9 + 1.8 * (p + 0.37) / 10.0;
            for (int q = 0; q < 5; ++q)
                worst = std::max(worst, boundary_identity_check(st, x1, {-0.6 + 0.3 * q, 0.1}));
        }
        return worst;
    };
    const double r256 = worst_for(256), r512 = worst_for(512);
    const bool bound = r256 <= 1e-2 * 2.0 * kPi;
    const bool halves = r512 <= 0.5 * r256;
    return {bound && halves, "residual N=256: " + fmt(r256) + ", N=512: " + fmt(r512) + " (bound " +
                                 (bound ? "met" : "missed") + ", halving " + (halves ? "met" : "missed") + ")"};
}

Outcome far_field_matching() {
    const double k = 10.0;
    auto solver = std::make_shared<ForwardSolver>(SurfaceProfile::example1(), k);
    const std::vector<IncidentDirection> dirs{IncidentDirection(1.3 * kPi), IncidentDirection(1.5 * kPi),
                                              IncidentDirection(1.85 * kPi)};
    ScatteringState st(solver, dirs);
    const std::vector<Vec2> xh{polar(1.0, 0.4), polar(1.0, 1.1), polar(1.0, 2.5)};
    const auto uinf = st.far_field(xh);
    const std::vector<double> rs{50, 100, 200, 400};
    std::vector<double> slopes;
    bool ok = true;
    for (std::size_t a = 0; a < xh.size(); ++a) {
        std::vector<Vec2> xs;
        for (double r : rs) xs.push_back(xh[a] * r);
        const auto us = st.scattered(xs);
        std::vector<double> es;
        for (std::size_t i = 0; i < rs.size(); ++i)
            es.push_back(std::abs(std::sqrt(rs[i]) * std::exp(cplx(0.0, -k * rs[i])) * us.get(i, a) - uinf.get(a, a)));
        slopes.push_back(loglog_slope(rs, es));
        ok = ok && slopes.back() >= -1.2 && slopes.back() <= -0.8;
    }
    return {ok, "slopes " + list(slopes)};
}

PhaseIntegral random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double al = 0.5 + 2.0 * u(rng), be = 0.5 * u(rng), om = -3.0 + 6.0 * u(rng);
    const cplx c0(0.5 + u(rng), -0.5 + u(rng)), c1(-1.0 + 2.0 * u(rng), -1.0 + 2.0 * u(rng));
    PhaseIntegral pi;
    pi.a = 0.0;
    pi.b = 0.5 + 2.0 * u(rng);
    pi.gamma = std::pow(10.0, 2.0 + 3.0 * u(rng));
    pi.p = [=](double t) {
        const double s = std::sin(0.5 * t);
        return 2.0 * al * s * s + be * t * t * t;
    };
    pi.dp = [=](double t) { return al * std::sin(t) + 3.0 * be * t * t; };
    pi.d2p = [=](double t) { return al * std::cos(t) + 6.0 * be * t; };
    pi.q = [=](double t) { return std::exp(cplx(0.0, om * t)) * (c0 + c1 * t); };
    pi.dq = [=](double t) { return std::exp(cplx(0.0, om * t)) * (c1 + cplx(0.0, om) * (c0 + c1 * t)); };
    pi.p0 = 0.5 * al;
    pi.p1 = be;
    pi.q0 = c0;
    pi.q1 = c1 + cplx(0.0, om) * c0;
    return pi;
}

Outcome stationary_phase() {
    std::mt19937_64 rng(kSeed);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto pi = random_instance(rng);
        const auto r = stationary_expand(pi, 0, 1);
        const double err = std::abs(oscillatory_quadrature(pi) - r.value);
        worst = std::max(worst, err / r.bound());
        if (!(err <= r.bound())) ++violations;
    }
    // Closed forms: worst residual over a fixed probe set at each radius.
    const double k = 10.0;
    const std::vector<double> rs{50, 100, 200, 400};
    std::vector<double> e2, e3;
    for (double r : rs) {
        double m2 = 0.0, m3 = 0.0;
        for (int q = 0; q < 5; ++q)
            for (double th : {kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0}) {
                const Vec2 z{-0.6 + 0.3 * q, 0.1}, x = polar(r, th);
                m2 = std::max(m2, std::abs(u2_quadrature(x, z, k) - u2_closed(x, z, k)));
                m3 = std::max(m3, std::abs(u3_quadrature(x, z, k) - u3_closed(x, z, k)));
            }
        e2.push_back(m2);
        e3.push_back(m3);
    }
    const double s2 = loglog_slope(rs, e2), s3 = loglog_slope(rs, e3);
    const bool slopes_ok = std::fabs(s2 + 1.0) <= 0.15 && std::fabs(s3 + 1.0) <= 0.15;
    return {violations == 0 && slopes_ok, std::to_string(violations) + " bound violations (worst error/bound " +
                                              fmt(worst) + "), residual slopes U2 " + fmt(s2) + ", U3 " + fmt(s3)};
}

Outcome indicator_convergence() {
    const double k = 10.0;
    const auto profile = SurfaceProfile::example1();
    const auto zs = near_surface_points(profile);
    auto solver = std::make_shared<ForwardSolver>(profile, k);

    // Part 1: the residual I - F_R over R in {10, 20, 40}.
    bool monotone = true;
    std::vector<std::vector<double>> gaps(zs.size());
    {
        const MeasurementConfig base{k, 0.0, 128, 128, 0};
        ScatteringState st(solver, base.directions());
        for (double R : {10.0, 20.0, 40.0}) {
            MeasurementConfig mc = base;
            mc.R = R;
            const auto pl = synthesize_phaseless(st, mc);
            const auto ind = indicator_phaseless(pl, zs);
            const auto fr = f_r(st, R, mc.M, zs);
            for (std::size_t i = 0; i < zs.size(); ++i) gaps[i].push_back(std::fabs(ind[i] - fr[i]));
        }
        for (const auto& g : gaps) monotone = monotone && g[1] <= g[0] && g[2] <= g[1];
    }

    // Part 2: F_R -> F0, with both quadratures resolving the oscillation in R.
    MeasurementConfig far{k, 0.0, 0, 512, 512};
    const auto ff = synthesize_farfield(profile, far);
    std::vector<double> f0s;
    for (const auto& z : zs) f0s.push_back(f0(ff, z));
    const std::vector<double> Rs{20, 40, 80, 160};
    std::vector<std::vector<double>> dev(zs.size());
    for (double R : Rs) {
        const auto n = static_cast<std::size_t>(std::max(128.0, 4.0 * k * R));
        ScatteringState st(solver, midpoint_directions(n));
        const auto fr = f_r(st, R, n, zs);
        for (std::size_t i = 0; i < zs.size(); ++i) dev[i].push_back(std::fabs(fr[i] - f0s[i]));
    }
    std::vector<double> slopes;
    bool decays = true;
    for (const auto& d : dev) {
        slopes.push_back(loglog_slope(Rs, d));
        decays = decays && slopes.back() <= -0.15;
    }
    std::ostringstream os;
    os << "|I - F_R| non-increasing: " << (monotone ? "yes" : "no");
    for (std::size_t i = 0; i < zs.size(); ++i) os << (i ? " " : " ") << list(gaps[i]);
    os << "; |F_R - F0| slopes " << list(slopes);
    return {monotone && decays, os.str()};
}

struct Reconstruction {
    ImagingResult clean, noisy10, noisy40;
};

const Reconstruction& reconstruction() {
    static const Reconstruction r = [] {
        const auto profile = SurfaceProfile::example1();
        const MeasurementConfig mc{20.0, 4.0, 128, 128, 0};
        const auto pl = synthesize_phaseless(profile, mc);
        const auto grid = default_grid(profile);
        Reconstruction out;
        out.clean = image_phaseless(pl, grid);
        out.noisy10 = image_phaseless(apply_noise(pl, 0.1, kSeed), grid);
        out.noisy40 = image_phaseless(apply_noise(pl, 0.4, kSeed + 1), grid);
        return out;
    }();
    return r;
}

Outcome desk_reconstruction() {
    const auto profile = SurfaceProfile::example1();
    const double k = 20.0;
    const auto pts = extract_surface(reconstruction().noisy10, profile.support());
    const double rate = surface_hit_rate(pts, profile, 0.1 * 2.0 * kPi / k);
    return {rate >= 0.9, "hit rate " + fmt(rate) + " over " + std::to_string(pts.size()) + " columns"};
}

Outcome noise_robustness() {
    const double rho = pearson(reconstruction().clean.values, reconstruction().noisy40.values);
    return {rho >= 0.9, "Pearson(0%, 40%) = " + fmt(rho)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"flat surface", flat_surface},
        {"reciprocity", reciprocity},
        {"boundary identity", boundary_identity},
        {"far-field matching", far_field_matching},
        {"stationary phase", stationary_phase},
        {"indicator convergence", indicator_convergence},
        {"reconstruction", desk_reconstruction},
        {"noise robustness", noise_robustness},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
