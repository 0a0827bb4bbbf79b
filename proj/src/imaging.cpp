#include "lrsi/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lrsi/parallel.hpp"
#include "lrsi/specialfun.hpp"

namespace lrsi {

namespace {

constexpr std::size_t kBlock = 256;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

std::vector<Vec2> direction_vectors(std::size_t n) {
    std::vector<Vec2> out;
    out.reserve(n);
    for (const auto& d : midpoint_directions(n)) out.push_back(d.d());
    return out;
}

// Rows e^{-ik z.d_j} (and, if `mirrored`, a second block e^{-ik z'.d_j}) for
// the points zs[first .. first + count).
simd::SplitMatrix plane_wave_block(double k, const std::vector<Vec2>& ds, const std::vector<Vec2>& zs,
                                   std::size_t first, std::size_t count, bool mirrored) {
    const std::size_t n = ds.size();
    simd::SplitMatrix e(mirrored ? 2 * n : n, count);
    for (std::size_t j = 0; j < n; ++j) {
        double* er = e.re_row(j);
        double* ei = e.im_row(j);
        double* mr = mirrored ? e.re_row(n + j) : nullptr;
        double* mi = mirrored ? e.im_row(n + j) : nullptr;
        for (std::size_t c = 0; c < count; ++c) {
            const Vec2& z = zs[first + c];
            const double a = -k * dot(z, ds[j]);
            er[c] = std::cos(a);
            ei[c] = std::sin(a);
            if (mirrored) {
                const double b = -k * dot(mirror(z), ds[j]);
                mr[c] = std::cos(b);
                mi[c] = std::sin(b);
            }
        }
    }
    return e;
}

// out[c] = scale * sum_i |(A E)(i, c)|^2 over blocks of points, optionally
// after a per-entry correction.
template <class Fix>
std::vector<double> blocked_abs2(const simd::SplitMatrix& a, double k, const std::vector<Vec2>& ds,
                                 const std::vector<Vec2>& zs, bool mirrored, double scale, int threads,
                                 Fix fix) {
    std::vector<double> out(zs.size(), 0.0);
    const std::size_t blocks = (zs.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t first = b * kBlock;
        const std::size_t count = std::min(kBlock, zs.size() - first);
        const auto e = plane_wave_block(k, ds, zs, first, count, mirrored);
        simd::SplitMatrix t(a.rows(), count);
        simd::cgemm(a.view(), e.view(), t.view());
        fix(t, first);
        simd::column_abs2_sums(t.view(), out.data() + first);
        for (std::size_t c = 0; c < count; ++c) out[first + c] *= scale;
    });
    return out;
}

void check_phaseless(const PhaselessDataset& data) {
    data.validate();
    if (!(data.config.k > 0.0) || !(data.config.R > 0.0))
        throw DomainError("phaseless dataset: k and R must be positive");
}

void check_farfield(const FarFieldDataset& data) {
    data.validate();
    if (!(data.config.k > 0.0)) throw DomainError("far-field dataset: k must be positive");
}

}  // namespace

std::vector<Vec2> SamplingGrid::points() const {
    std::vector<Vec2> out;
    out.reserve(size());
    for (std::size_t r = 0; r < n2; ++r)
        for (std::size_t c = 0; c < n1; ++c) out.push_back(point(r, c));
    return out;
}

void SamplingGrid::validate() const {
    if (n1 < 2 || n2 < 2) throw DomainError("sampling grid: need at least 2 x 2 points");
    if (!(x1_max > x1_min) || !(x2_max > x2_min)) throw DomainError("sampling grid: empty rectangle");
}

bool SamplingGrid::covers(const SurfaceProfile& profile) const {
    if (profile.is_flat()) return x2_min < 0.0 && x2_max > 0.0;
    const auto s = profile.support();
    return x1_min < s.lo && x1_max > s.hi && x2_min < profile.min_height() && x2_max > profile.max_height();
}

SamplingGrid default_grid(const SurfaceProfile& profile) {
    SamplingGrid g;
    if (profile.is_flat()) {
        g.x1_min = -1.0;
        g.x1_max = 1.0;
        g.x2_min = -0.2;
        g.x2_max = 0.2;
    } else {
        const auto s = profile.support();
        g.x1_min = s.lo - 0.3;
        g.x1_max = s.hi + 0.3;
        g.x2_min = std::min(profile.min_height(), 0.0) - 0.2;
        g.x2_max = std::max(profile.max_height(), 0.0) + 0.2;
    }
    g.n1 = 201;
    g.n2 = 101;
    return g;
}

const char* indicator_name(IndicatorKind kind) { return kind == IndicatorKind::phaseless ? "phaseless" : "full"; }

// ---------------------------------------------------------------------------

double indicator_phaseless(const PhaselessDataset& data, const Vec2& z) {
    check_phaseless(data);
    const auto& c = data.config;
    const double k = c.k;
    const auto xs = c.receivers();
    const auto ds = direction_vectors(c.N);
    double total = 0.0;
    for (std::size_t i = 0; i < c.M; ++i) {
        const Vec2 x = xs[i];
        cplx inner = 0.0;
        for (std::size_t j = 0; j < c.N; ++j) {
            const Vec2 d = ds[j];
            const double u = data.at(i, j);
            const cplx b = u * u - 2.0 + expi(2.0 * k * x.x2 * d.x2);
            inner += b * expi(k * dot(x - z, d)) - expi(k * dot(mirror(x) - mirror(z), d));
        }
        total += std::norm(inner);
    }
    return kPi * kPi * kPi * c.R / (static_cast<double>(c.M) * c.N * c.N) * total;
}

std::vector<double> indicator_phaseless(const PhaselessDataset& data, const std::vector<Vec2>& zs, int threads) {
    check_phaseless(data);
    const auto& c = data.config;
    const double k = c.k;
    const auto xs = c.receivers();
    const auto ds = direction_vectors(c.N);
    const std::size_t n = c.N;
    simd::SplitMatrix a(c.M, 2 * n);
    for (std::size_t i = 0; i < c.M; ++i) {
        const Vec2 x = xs[i];
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 d = ds[j];
            const double u = data.at(i, j);
            const cplx b = u * u - 2.0 + expi(2.0 * k * x.x2 * d.x2);
            a.set(i, j, b * expi(k * dot(x, d)));
            a.set(i, n + j, -expi(k * dot(mirror(x), d)));
        }
    }
    const double scale = kPi * kPi * kPi * c.R / (static_cast<double>(c.M) * n * n);
    return blocked_abs2(a, k, ds, zs, true, scale, threads, [](simd::SplitMatrix&, std::size_t) {});
}

double indicator_full(const FarFieldDataset& data, const Vec2& z) {
    check_farfield(data);
    const auto& c = data.config;
    const double k = c.k;
    const auto xh = c.observation_directions();
    const auto ds = direction_vectors(c.N);
    const cplx amp = std::sqrt(2.0 * kPi / k) * expi(-0.25 * kPi);
    double total = 0.0;
    for (std::size_t i = 0; i < c.L; ++i) {
        cplx inner = 0.0;
        for (std::size_t j = 0; j < c.N; ++j) inner += data.at(i, j) * expi(-k * dot(z, ds[j]));
        inner *= kPi / static_cast<double>(c.N);
        inner -= amp * (expi(-k * dot(xh[i], mirror(z))) + expi(-k * dot(xh[i], z)));
        total += std::norm(inner);
    }
    return kPi / static_cast<double>(c.L) * total;
}

std::vector<double> indicator_full(const FarFieldDataset& data, const std::vector<Vec2>& zs, int threads) {
    check_farfield(data);
    const auto& c = data.config;
    const double k = c.k;
    const auto xh = c.observation_directions();
    const auto ds = direction_vectors(c.N);
    const cplx amp = std::sqrt(2.0 * kPi / k) * expi(-0.25 * kPi);
    simd::SplitMatrix a(c.L, c.N);
    const double w = kPi / static_cast<double>(c.N);
    for (std::size_t i = 0; i < c.L; ++i)
        for (std::size_t j = 0; j < c.N; ++j) a.set(i, j, w * data.at(i, j));
    auto fix = [&](simd::SplitMatrix& t, std::size_t first) {
        for (std::size_t i = 0; i < t.rows(); ++i)
            for (std::size_t col = 0; col < t.cols(); ++col) {
                const Vec2& z = zs[first + col];
                const cplx v = t.get(i, col) - amp * (expi(-k * dot(xh[i], mirror(z))) + expi(-k * dot(xh[i], z)));
                t.set(i, col, v);
            }
    };
    return blocked_abs2(a, k, ds, zs, false, kPi / static_cast<double>(c.L), threads, fix);
}

ImagingResult image_phaseless(const PhaselessDataset& data, const SamplingGrid& grid, int threads) {
    grid.validate();
    ImagingResult r;
    r.kind = IndicatorKind::phaseless;
    r.grid = grid;
    r.values = indicator_phaseless(data, grid.points(), threads);
    r.config_hash = data.provenance.config_hash;
    r.seed = data.provenance.seed;
    return r;
}

ImagingResult image_full(const FarFieldDataset& data, const SamplingGrid& grid, int threads) {
    grid.validate();
    ImagingResult r;
    r.kind = IndicatorKind::full;
    r.grid = grid;
    r.values = indicator_full(data, grid.points(), threads);
    r.config_hash = data.provenance.config_hash;
    r.seed = data.provenance.seed;
    return r;
}

// ---------------------------------------------------------------------------

std::array<cplx, 3> u_components(const ScatteringState& state, const Vec2& x, const Vec2& z) {
    const double k = state.k();
    const auto us = state.scattered_at(x);
    std::array<cplx, 3> out{};
    for (std::size_t j = 0; j < us.size(); ++j) {
        const Vec2 d = state.directions()[j].d();
        const cplx ez = expi(-k * dot(z, d));
        const cplx refl = expi(k * dot(x, mirror(d)));
        out[0] += us[j] * ez;
        out[1] -= refl * ez;
        out[2] -= refl * expi(-k * dot(mirror(z), d));
    }
    const double w = kPi / static_cast<double>(us.size());
    for (auto& v : out) v *= w;
    return out;
}

std::array<cplx, 4> w_components(const ScatteringState& state, const Vec2& x, const Vec2& z) {
    const double k = state.k();
    const auto us = state.scattered_at(x);
    std::array<cplx, 4> out{};
    for (std::size_t j = 0; j < us.size(); ++j) {
        const Vec2 d = state.directions()[j].d();
        const cplx ez = expi(-k * dot(z, d));
        const cplx ui = incident_wave(k, d, x);
        const cplx ur = reflected_wave(k, d, x);
        const cplx s = us[j];
        out[0] += ui * ui * std::conj(s) * ez;
        out[1] += ui * ur * std::conj(s) * ez;
        out[2] += ui * std::conj(ur) * s * ez;
        out[3] += ui * std::norm(s) * ez;
    }
    const double w = kPi / static_cast<double>(us.size());
    for (auto& v : out) v *= w;
    return out;
}

cplx phaseless_bracket(const ScatteringState& state, const Vec2& x, const Vec2& z) {
    const double k = state.k();
    const auto us = state.scattered_at(x);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < us.size(); ++j) {
        const Vec2 d = state.directions()[j].d();
        const double u2 = std::norm(incident_trace(k, d, x) + us[j]);
        const cplx b = u2 - 2.0 + expi(2.0 * k * x.x2 * d.x2);
        sum += b * expi(k * dot(x - z, d)) - expi(k * dot(mirror(x) - mirror(z), d));
    }
    return kPi / static_cast<double>(us.size()) * sum;
}

std::vector<double> f_r(const ScatteringState& state, double R, std::size_t M, const std::vector<Vec2>& zs) {
    if (M == 0) throw DomainError("f_r: M must be >= 1");
    if (!(R > circumradius(state.solver().profile())))
        throw DomainError("f_r: R must exceed the perturbation's circumradius");
    const double k = state.k();
    MeasurementConfig mc;
    mc.R = R;
    mc.M = M;
    const auto xs = mc.receivers();
    const std::size_t n = state.num_directions();
    std::vector<Vec2> ds;
    for (const auto& d : state.directions()) ds.push_back(d.d());
    const auto us = state.scattered(xs);
    const double w = kPi / static_cast<double>(n);
    simd::SplitMatrix a(M, 2 * n);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const cplx refl = expi(k * dot(xs[i], mirror(ds[j])));
            a.set(i, j, w * (us.get(i, j) - refl));
            a.set(i, n + j, -w * refl);
        }
    return blocked_abs2(a, k, ds, zs, true, kPi * R / static_cast<double>(M), state.threads(),
                        [](simd::SplitMatrix&, std::size_t) {});
}

double f_r(const ScatteringState& state, double R, std::size_t M, const Vec2& z) {
    return f_r(state, R, M, std::vector<Vec2>{z})[0];
}

double f0(const FarFieldDataset& data, const Vec2& z) { return indicator_full(data, z); }

double boundary_identity_check(const ScatteringState& state, double x1, const Vec2& z) {
    const double k = state.k();
    const Vec2 x{x1, state.solver().profile().height_or_flat(x1)};
    const auto us = state.boundary_trace(x1);
    cplx u = 0.0;
    for (std::size_t j = 0; j < us.size(); ++j) {
        const Vec2 d = state.directions()[j].d();
        const cplx refl = expi(k * dot(x, mirror(d)));
        u += us[j] * expi(-k * dot(z, d)) - refl * (expi(-k * dot(z, d)) + expi(-k * dot(mirror(z), d)));
    }
    u *= kPi / static_cast<double>(us.size());
    return std::abs(u + 2.0 * kPi * bessel_j0(k * norm(x - z)));
}

// ---------------------------------------------------------------------------

std::vector<SurfacePoint> extract_surface(const ImagingResult& result, const Interval& window) {
    const auto& g = result.grid;
    g.validate();
    if (result.values.size() != g.size()) throw ContractError("extract_surface: value count does not match grid");
    std::vector<SurfacePoint> out;
    for (std::size_t c = 0; c < g.n1; ++c) {
        const double x1 = g.x1(c);
        if (x1 < window.lo || x1 > window.hi) continue;
        std::size_t best = 0;
        for (std::size_t r = 1; r < g.n2; ++r)
            if (result.at(r, c) > result.at(best, c)) best = r;
        SurfacePoint p{x1, g.x2(best), false};
        if (best == 0 || best + 1 == g.n2) {
            p.flagged = true;
        } else {
            const double fm = result.at(best - 1, c), f0v = result.at(best, c), fp = result.at(best + 1, c);
            const double den = fm - 2.0 * f0v + fp;
            if (den < 0.0) p.x2 += 0.5 * (fm - fp) / den * g.dx2();
        }
        out.push_back(p);
    }
    return out;
}

double surface_hit_rate(const std::vector<SurfacePoint>& pts, const SurfaceProfile& profile, double tol) {
    if (pts.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& p : pts)
        if (!p.flagged && std::fabs(p.x2 - profile.height_or_flat(p.x1)) <= tol) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pts.size());
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw ContractError("pearson: need two equally sized samples");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

void write_meta(std::ostream& os, const ImagingResult& r) {
    const auto& g = r.grid;
    os << "# indicator = " << indicator_name(r.kind) << "\n";
    os << "# grid = " << format_double(g.x1_min) << ',' << format_double(g.x1_max) << ','
       << format_double(g.x2_min) << ',' << format_double(g.x2_max) << ',' << g.n1 << ',' << g.n2 << "\n";
    os << "# config-hash = " << (r.config_hash.empty() ? "none" : r.config_hash) << "\n";
    os << "# seed = " << r.seed << "\n";
}

}  // namespace

void write_grid_csv(const ImagingResult& r, const std::string& path) {
    auto os = open_out(path);
    write_meta(os, r);
    for (std::size_t row = 0; row < r.grid.n2; ++row) {
        for (std::size_t c = 0; c < r.grid.n1; ++c) {
            if (c) os << ',';
            os << format_double(r.at(row, c));
        }
        os << '\n';
    }
}

ImagingResult read_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    ImagingResult r;
    std::string line;
    std::size_t lineno = 0;
    bool have_grid = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            const std::string val = line.substr(line.find_first_not_of(' ', eq + 1));
            if (key == "indicator") {
                r.kind = val == "full" ? IndicatorKind::full : IndicatorKind::phaseless;
            } else if (key == "grid") {
                std::istringstream ss(val);
                char comma;
                if (!(ss >> r.grid.x1_min >> comma >> r.grid.x1_max >> comma >> r.grid.x2_min >> comma >>
                      r.grid.x2_max >> comma >> r.grid.n1 >> comma >> r.grid.n2))
                    throw ParseError("malformed grid line", lineno);
                have_grid = true;
            } else if (key == "config-hash") {
                r.config_hash = val == "none" ? "" : val;
            } else if (key == "seed") {
                r.seed = std::stoull(val);
            }
            continue;
        }
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            const std::string f = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str()) throw ParseError("malformed number", lineno);
            r.values.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (!have_grid) throw IntegrityError("imaging grid file has no grid line");
    if (r.values.size() != r.grid.size()) throw IntegrityError("imaging grid file: value count does not match grid");
    return r;
}

void write_pgm(const ImagingResult& r, const std::string& path) {
    const auto [lo_it, hi_it] = std::minmax_element(r.values.begin(), r.values.end());
    const double lo = lo_it == r.values.end() ? 0.0 : *lo_it;
    const double hi = hi_it == r.values.end() ? 0.0 : *hi_it;
    const double span = hi > lo ? hi - lo : 1.0;
    auto os = open_out(path);
    os << "P5\n# config-hash " << (r.config_hash.empty() ? "none" : r.config_hash) << " seed " << r.seed << "\n"
       << r.grid.n1 << ' ' << r.grid.n2 << "\n255\n";
    std::vector<unsigned char> row(r.grid.n1);
    for (std::size_t k = 0; k < r.grid.n2; ++k) {
        const std::size_t rr = r.grid.n2 - 1 - k;
        for (std::size_t c = 0; c < r.grid.n1; ++c)
            row[c] = static_cast<unsigned char>(std::lround(255.0 * (r.at(rr, c) - lo) / span));
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

void write_polyline_csv(const ImagingResult& r, const std::string& path) {
    auto os = open_out(path);
    os << "# config-hash = " << (r.config_hash.empty() ? "none" : r.config_hash) << "\n";
    os << "# seed = " << r.seed << "\n";
    os << "x1,x2,flagged\n";
    for (const auto& p : r.surface) os << format_double(p.x1) << ',' << format_double(p.x2) << ',' << (p.flagged ? 1 : 0) << '\n';
}

}  // namespace lrsi
