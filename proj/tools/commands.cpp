#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "lrsi/asymptotics.hpp"
#include "lrsi/dataset.hpp"
#include "lrsi/imaging.hpp"
#include "lrsi/specialfun.hpp"

namespace lrsi::cli {

namespace fs = std::filesystem;

namespace {

double req_number(const json& cfg, const char* key) {
    if (!cfg.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    if (!cfg[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return cfg[key].get<double>();
}

double opt_number(const json& cfg, const char* key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return cfg[key].get<double>();
}

std::size_t opt_count(const json& cfg, const char* key, std::size_t fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_number_integer() || cfg[key].get<long long>() < 1)
        throw ConfigError(std::string("'") + key + "' must be a positive integer");
    return cfg[key].get<std::size_t>();
}

std::string opt_string(const json& cfg, const char* key, const std::string& fallback) {
    if (!cfg.contains(key)) return fallback;
    if (!cfg[key].is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
    return cfg[key].get<std::string>();
}

std::uint64_t seed_of(const json& cfg) {
    if (!cfg.contains("seed")) return 0;
    if (!cfg["seed"].is_number_unsigned()) throw ConfigError("'seed' must be an unsigned integer");
    return cfg["seed"].get<std::uint64_t>();
}

int threads_of(const json& cfg) {
    if (!cfg.contains("threads")) return 1;
    if (!cfg["threads"].is_number_integer()) throw ConfigError("'threads' must be an integer");
    return cfg["threads"].get<int>();
}

fs::path out_dir(const json& cfg) {
    fs::path p = opt_string(cfg, "out", ".");
    fs::create_directories(p);
    return p;
}

SurfaceProfile profile_of(const json& cfg) {
    if (!cfg.contains("profile")) throw ConfigError("missing key 'profile'");
    return profile_from_json(cfg["profile"]);
}

SolverOptions solver_of(const json& cfg) {
    SolverOptions so;
    so.points_per_wavelength = opt_number(cfg, "ppw", so.points_per_wavelength);
    so.threads = threads_of(cfg);
    return so;
}

// Output location and worker count do not affect results, so they are left
// out of the hash.
std::string run_hash(const json& cfg) {
    json c = cfg;
    c.erase("out");
    c.erase("threads");
    return config_hash(c);
}

void stamp(std::ostream& os, const json& cfg) {
    os << "# config-hash = " << run_hash(cfg) << "\n";
    os << "# seed = " << seed_of(cfg) << "\n";
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace

json load_config(const std::string& path, const Overrides& ov) {
    json cfg = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file " + path);
        try {
            cfg = json::parse(in, nullptr, true, true);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        if (!cfg.is_object()) throw ConfigError("config: top level must be an object");
    }
    if (ov.seed) cfg["seed"] = *ov.seed;
    if (ov.threads) cfg["threads"] = *ov.threads;
    if (ov.out) cfg["out"] = *ov.out;
    return cfg;
}

// ---------------------------------------------------------------------------

int cmd_forward(const json& cfg, std::ostream& log) {
    reject_unknown_keys(cfg, {"profile", "k", "ppw", "directions", "angles", "points", "far_field", "seed", "threads", "out"},
                        "forward config");
    const auto profile = profile_of(cfg);
    const double k = req_number(cfg, "k");
    std::vector<IncidentDirection> dirs;
    if (cfg.contains("angles")) {
        if (!cfg["angles"].is_array()) throw ConfigError("'angles' must be an array");
        for (const auto& a : cfg["angles"]) {
            if (!a.is_number()) throw ConfigError("'angles' entries must be numbers");
            try {
                dirs.emplace_back(a.get<double>());
            } catch (const DomainError& e) {
                throw ConfigError(std::string("angles: ") + e.what());
            }
        }
    } else {
        dirs = midpoint_directions(opt_count(cfg, "directions", 8));
    }
    std::vector<Vec2> points;
    if (cfg.contains("points")) {
        if (!cfg["points"].is_array()) throw ConfigError("'points' must be an array of [x1, x2]");
        for (const auto& p : cfg["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ConfigError("'points' entries must be [x1, x2]");
            points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    const std::size_t L = opt_count(cfg, "far_field", 64);
    if (!(k > 0.0)) throw ConfigError("'k' must be positive");

    auto solver = std::make_shared<ForwardSolver>(profile, k, solver_of(cfg));
    ScatteringState state(solver, dirs, threads_of(cfg));
    const auto dir = out_dir(cfg);

    const auto xh = midpoint_upper_directions(L);
    const auto ff = state.far_field(xh);
    {
        auto os = open_out(dir / "farfield.csv");
        stamp(os, cfg);
        os << "xhat_angle,d_angle,re,im\n";
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < dirs.size(); ++j) {
                const cplx v = ff.get(i, j);
                os << format_double(std::atan2(xh[i].x2, xh[i].x1)) << ',' << format_double(dirs[j].angle()) << ','
                   << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
            }
    }
    if (!points.empty()) {
        const auto us = state.scattered(points);
        auto os = open_out(dir / "field.csv");
        stamp(os, cfg);
        os << "x1,x2,d_angle,re,im\n";
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = 0; j < dirs.size(); ++j) {
                const cplx v = us.get(i, j);
                os << format_double(points[i].x1) << ',' << format_double(points[i].x2) << ','
                   << format_double(dirs[j].angle()) << ',' << format_double(v.real()) << ','
                   << format_double(v.imag()) << '\n';
            }
    }
    log << "forward: " << solver->unknowns() << " unknowns, " << dirs.size() << " directions, written to "
        << dir.string() << "\n";
    return kOk;
}

int cmd_synth(const json& cfg, std::ostream& log) {
    reject_unknown_keys(cfg, {"profile", "k", "ppw", "R", "M", "N", "L", "data", "delta", "noise_model", "name", "seed",
                              "threads", "out"},
                        "synth config");
    const auto profile = profile_of(cfg);
    MeasurementConfig mc;
    mc.k = req_number(cfg, "k");
    mc.N = opt_count(cfg, "N", 64);
    const std::string kind = opt_string(cfg, "data", "phaseless");
    if (kind != "phaseless" && kind != "farfield" && kind != "both")
        throw ConfigError("'data' must be phaseless, farfield or both");
    const bool want_pl = kind != "farfield", want_ff = kind != "phaseless";
    if (want_pl) {
        mc.R = req_number(cfg, "R");
        mc.M = opt_count(cfg, "M", 64);
    }
    if (want_ff) mc.L = opt_count(cfg, "L", 64);
    const double delta = opt_number(cfg, "delta", 0.0);
    if (delta < 0.0) throw ConfigError("'delta' must be >= 0");
    NoiseModel model;
    try {
        model = noise_model_from_name(opt_string(cfg, "noise_model", "uniform"));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const std::uint64_t seed = seed_of(cfg);
    const int threads = threads_of(cfg);
    const std::string name = opt_string(cfg, "name", "data");
    if (!(mc.k > 0.0)) throw ConfigError("'k' must be positive");
    if (want_pl && !(mc.R > circumradius(profile)))
        throw ConfigError("'R' must exceed the perturbation's circumradius");

    auto solver = std::make_shared<ForwardSolver>(profile, mc.k, solver_of(cfg));
    ScatteringState state(solver, mc.directions(), threads);
    const auto dir = out_dir(cfg);
    const std::string hash = run_hash(cfg);
    if (want_pl) {
        auto d = apply_noise(synthesize_phaseless(state, mc), delta, seed, model);
        d.provenance.config_hash = hash;
        save(d, (dir / (name + ".pld")).string());
    }
    if (want_ff) {
        auto d = apply_noise(synthesize_farfield(state, mc), delta, seed, model);
        d.provenance.config_hash = hash;
        save(d, (dir / (name + ".ffd")).string());
    }
    log << "synth: wrote " << kind << " data to " << dir.string() << " (config " << hash << ")\n";
    return kOk;
}

int cmd_reconstruct(const json& cfg, std::ostream& log) {
    reject_unknown_keys(cfg, {"dataset", "grid", "profile", "window", "name", "seed", "threads", "out"},
                        "reconstruct config");
    const std::string path = opt_string(cfg, "dataset", "");
    if (path.empty()) throw ConfigError("missing key 'dataset'");
    const bool full = fs::path(path).extension() == ".ffd";

    PhaselessDataset pl;
    FarFieldDataset ffd;
    Provenance prov;
    if (full) {
        ffd = load_farfield(path);
        prov = ffd.provenance;
    } else {
        pl = load_phaseless(path);
        prov = pl.provenance;
    }

    std::optional<SurfaceProfile> profile;
    if (cfg.contains("profile")) {
        profile = profile_from_json(cfg["profile"]);
    } else if (!prov.profile_spec.empty()) {
        try {
            profile = profile_from_json(json::parse(prov.profile_spec));
        } catch (const std::exception&) {
            profile.reset();
        }
    }

    SamplingGrid grid;
    if (profile) grid = default_grid(*profile);
    if (cfg.contains("grid")) {
        const auto& g = cfg["grid"];
        reject_unknown_keys(g, {"x1_min", "x1_max", "x2_min", "x2_max", "n1", "n2"}, "grid");
        grid.x1_min = opt_number(g, "x1_min", grid.x1_min);
        grid.x1_max = opt_number(g, "x1_max", grid.x1_max);
        grid.x2_min = opt_number(g, "x2_min", grid.x2_min);
        grid.x2_max = opt_number(g, "x2_max", grid.x2_max);
        grid.n1 = opt_count(g, "n1", grid.n1);
        grid.n2 = opt_count(g, "n2", grid.n2);
    } else if (!profile) {
        throw ConfigError("reconstruct: no 'grid' given and the dataset does not describe its profile");
    }
    try {
        grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (profile && !grid.covers(*profile))
        log << "warning: sampling grid does not cover the perturbation; proceeding\n";

    Interval window{grid.x1_min, grid.x1_max};
    if (cfg.contains("window")) {
        const auto& w = cfg["window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            throw ConfigError("'window' must be [lo, hi]");
        window = {w[0].get<double>(), w[1].get<double>()};
    } else if (profile && !profile->is_flat()) {
        window = profile->support();
    }

    const int threads = threads_of(cfg);
    ImagingResult r = full ? image_full(ffd, grid, threads) : image_phaseless(pl, grid, threads);
    r.config_hash = run_hash(cfg);
    r.seed = seed_of(cfg);
    r.surface = extract_surface(r, window);

    const auto dir = out_dir(cfg);
    const std::string name = opt_string(cfg, "name", "image");
    write_grid_csv(r, (dir / (name + ".csv")).string());
    write_pgm(r, (dir / (name + ".pgm")).string());
    write_polyline_csv(r, (dir / (name + "_surface.csv")).string());
    log << "reconstruct: " << indicator_name(r.kind) << " indicator on " << grid.n1 << "x" << grid.n2
        << " grid, written to " << dir.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

namespace {

struct Check {
    std::string name;
    bool pass;
    json measured;
};

Check verify_flat() {
    const double k = 10.0;
    MeasurementConfig mc{k, 3.0, 64, 64, 64};
    const auto flat = SurfaceProfile::flat();
    const auto pl = synthesize_phaseless(flat, mc);
    const auto ff = synthesize_farfield(flat, mc);
    double ff_max = 0.0, pl_err = 0.0;
    for (const auto& v : ff.values) ff_max = std::max(ff_max, std::abs(v));
    const auto xs = mc.receivers();
    const auto ds = mc.directions();
    for (std::size_t i = 0; i < mc.M; ++i)
        for (std::size_t j = 0; j < mc.N; ++j) {
            const double exact = 2.0 * std::fabs(std::sin(k * xs[i].x2 * ds[j].d().x2));
            pl_err = std::max(pl_err, std::fabs(pl.at(i, j) - exact));
        }
    return {"flat", ff_max <= 1e-10 && pl_err <= 1e-10, {{"farfield_max", ff_max}, {"phaseless_max_error", pl_err}}};
}

Check verify_reciprocity(int threads) {
    MeasurementConfig mc{10.0, 0.0, 0, 32, 32};
    SynthOptions so;
    so.threads = threads;
    const auto ff = synthesize_farfield(SurfaceProfile::example1(), mc, so);
    double scale = 0.0, err = 0.0;
    // Observation i is the reversal of direction i on the midpoint grids.
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j) {
            scale = std::max(scale, std::abs(ff.at(i, j)));
            err = std::max(err, std::abs(ff.at(i, j) - ff.at(j, i)));
        }
    const double rel = err / scale;
    return {"reciprocity", rel <= 1e-3, {{"max_relative_mismatch", rel}}};
}

Check verify_boundary(int threads) {
    const double k = 10.0;
    auto solver = std::make_shared<ForwardSolver>(SurfaceProfile::example1(), k);
    ScatteringState st(solver, midpoint_directions(256), threads);
    double worst = 0.0;
    for (int p = 0; p < 10; ++p) {
        const double x1 = -0.9 + 1.8 * (p + 0.37) / 10.0;
        for (int q = 0; q < 5; ++q) worst = std::max(worst, boundary_identity_check(st, x1, {-0.6 + 0.3 * q, 0.1}));
    }
    return {"boundary", worst <= 2e-2 * kPi, {{"max_residual", worst}}};
}

Check verify_farfield(int threads) {
    const double k = 10.0;
    auto solver = std::make_shared<ForwardSolver>(SurfaceProfile::example1(), k);
    ScatteringState st(solver, {IncidentDirection(1.3 * kPi)}, threads);
    const Vec2 xh = polar(1.0, 1.1);
    const cplx uinf = st.far_field({xh}).get(0, 0);
    std::vector<double> rs{50, 100, 200, 400}, es;
    for (double r : rs) {
        const cplx us = st.scattered({xh * r}).get(0, 0);
        es.push_back(std::abs(std::sqrt(r) * std::exp(cplx(0.0, -k * r)) * us - uinf));
    }
    const double slope = loglog_slope(rs, es);
    return {"farfield", slope >= -1.2 && slope <= -0.8, {{"slope", slope}}};
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

Check verify_stationary_phase(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto pi = random_instance(rng);
        const auto r = stationary_expand(pi, 0, 1);
        const double err = std::abs(oscillatory_quadrature(pi) - r.value);
        worst = std::max(worst, err / r.bound());
        if (!(err <= r.bound())) ++violations;
    }
    return {"stationary_phase", violations == 0, {{"violations", violations}, {"worst_error_to_bound", worst}}};
}

}  // namespace

int cmd_verify(const json& cfg, const std::string& suite, std::ostream& report) {
    reject_unknown_keys(cfg, {"seed", "threads", "out"}, "verify config");
    const int threads = threads_of(cfg);
    const std::uint64_t seed = cfg.contains("seed") ? seed_of(cfg) : 20240601;
    std::vector<Check> checks;
    auto want = [&](const char* s) { return suite == "all" || suite == s; };
    if (want("flat")) checks.push_back(verify_flat());
    if (want("reciprocity")) checks.push_back(verify_reciprocity(threads));
    if (want("boundary")) checks.push_back(verify_boundary(threads));
    if (want("farfield")) checks.push_back(verify_farfield(threads));
    if (want("stationary_phase")) checks.push_back(verify_stationary_phase(seed));
    if (checks.empty()) throw ConfigError("verify: unknown suite '" + suite + "'");

    json out;
    out["config_hash"] = run_hash(cfg);
    out["seed"] = seed;
    bool ok = true;
    for (const auto& c : checks) {
        out["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}});
        ok = ok && c.pass;
    }
    out["pass"] = ok;
    const std::string text = out.dump(2);
    report << text << "\n";
    if (cfg.contains("out")) {
        auto os = open_out(out_dir(cfg) / "verify.json");
        os << text << "\n";
    }
    return ok ? kOk : kVerifyFailed;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const ContractError& e) {
        err << "invalid request: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace lrsi::cli
