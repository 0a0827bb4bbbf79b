#include "lrsi/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "lrsi/config.hpp"

namespace lrsi {

std::vector<Vec2> MeasurementConfig::receivers() const {
    std::vector<Vec2> out;
    out.reserve(M);
    for (std::size_t i = 1; i <= M; ++i) out.push_back(polar(R, kPi * (i - 0.5) / M));
    return out;
}

std::vector<IncidentDirection> MeasurementConfig::directions() const { return midpoint_directions(N); }

std::vector<Vec2> MeasurementConfig::observation_directions() const { return midpoint_upper_directions(L); }

const char* noise_model_name(NoiseModel m) {
    return m == NoiseModel::uniform ? "uniform" : "truncated_gaussian";
}

NoiseModel noise_model_from_name(const std::string& s) {
    if (s == "uniform") return NoiseModel::uniform;
    if (s == "truncated_gaussian") return NoiseModel::truncated_gaussian;
    throw DomainError("unknown noise model: " + s);
}

void PhaselessDataset::validate() const {
    if (values.size() != config.M * config.N) throw IntegrityError("phaseless dataset: size does not match M x N");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw IntegrityError("phaseless dataset: entries must be finite and >= 0");
}

void FarFieldDataset::validate() const {
    if (values.size() != config.L * config.N) throw IntegrityError("far-field dataset: size does not match L x N");
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw IntegrityError("far-field dataset: non-finite entry");
}

double circumradius(const SurfaceProfile& profile) {
    if (profile.is_flat()) return 0.0;
    const auto s = profile.support();
    double r = std::max(std::fabs(s.lo), std::fabs(s.hi));
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double x = s.lo + s.length() * i / n;
        r = std::max(r, std::hypot(x, profile.height_or_flat(x)));
    }
    return r;
}

namespace {

Provenance base_provenance(const SurfaceProfile& profile) {
    Provenance p;
    p.profile_kind = kind_name(profile.kind());
    p.profile_spec = profile_to_json(profile).dump();
    return p;
}

void check_config(const MeasurementConfig& c, const SurfaceProfile& profile, bool phaseless) {
    if (!(c.k > 0.0) || !std::isfinite(c.k)) throw DomainError("measurement config: k must be > 0");
    if (c.N == 0) throw DomainError("measurement config: N must be >= 1");
    if (phaseless) {
        if (c.M == 0) throw DomainError("measurement config: M must be >= 1");
        if (!(c.R > circumradius(profile)))
            throw DomainError("measurement config: R must exceed the perturbation's circumradius");
    } else if (c.L == 0) {
        throw DomainError("measurement config: L must be >= 1");
    }
}

std::shared_ptr<ForwardSolver> make_solver(const SurfaceProfile& profile, const MeasurementConfig& c,
                                           const SynthOptions& opt) {
    SolverOptions so = opt.solver;
    so.threads = opt.threads;
    return std::make_shared<ForwardSolver>(profile, c.k, so);
}

void check_columns(const simd::SplitMatrix& m) {
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const cplx v = m.get(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericError("forward solve failed for direction index " + std::to_string(j));
        }
}

}  // namespace

PhaselessDataset synthesize_phaseless(const SurfaceProfile& profile, const MeasurementConfig& config,
                                      const SynthOptions& opt) {
    check_config(config, profile, true);
    auto solver = make_solver(profile, config, opt);
    ScatteringState state(solver, config.directions(), opt.threads);
    return synthesize_phaseless(state, config, opt);
}

PhaselessDataset synthesize_phaseless(const ScatteringState& state, const MeasurementConfig& config,
                                      const SynthOptions& opt) {
    const auto& profile = state.solver().profile();
    check_config(config, profile, true);
    if (state.num_directions() != config.N || state.k() != config.k)
        throw ContractError("synthesize_phaseless: state does not match the measurement config");
    const auto rx = config.receivers();
    const auto us = state.scattered(rx);
    check_columns(us);
    PhaselessDataset out;
    out.config = config;
    out.provenance = base_provenance(profile);
    out.values.resize(config.M * config.N);
    for (std::size_t i = 0; i < config.M; ++i)
        for (std::size_t j = 0; j < config.N; ++j) {
            const Vec2 d = state.directions()[j].d();
            const cplx u = incident_trace(config.k, d, rx[i]) + us.get(i, j);
            out.values[i * config.N + j] = std::abs(opt.total_field_phase * u);
        }
    return out;
}

FarFieldDataset synthesize_farfield(const SurfaceProfile& profile, const MeasurementConfig& config,
                                    const SynthOptions& opt) {
    check_config(config, profile, false);
    auto solver = make_solver(profile, config, opt);
    ScatteringState state(solver, config.directions(), opt.threads);
    return synthesize_farfield(state, config);
}

FarFieldDataset synthesize_farfield(const ScatteringState& state, const MeasurementConfig& config) {
    const auto& profile = state.solver().profile();
    check_config(config, profile, false);
    if (state.num_directions() != config.N || state.k() != config.k)
        throw ContractError("synthesize_farfield: state does not match the measurement config");
    const auto ff = state.far_field(config.observation_directions());
    check_columns(ff);
    FarFieldDataset out;
    out.config = config;
    out.provenance = base_provenance(profile);
    out.values.resize(config.L * config.N);
    for (std::size_t i = 0; i < config.L; ++i)
        for (std::size_t j = 0; j < config.N; ++j) out.values[i * config.N + j] = ff.get(i, j);
    return out;
}

// ---------------------------------------------------------------------------

NoiseSource::NoiseSource(std::uint64_t seed, NoiseModel model) : engine_(seed), model_(model) {}

double NoiseSource::next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double NoiseSource::next() {
    if (model_ == NoiseModel::uniform) return 2.0 * next_unit() - 1.0;
    // Normal with standard deviation 1/2, redrawn until it falls in [-1, 1].
    for (;;) {
        const double u1 = 1.0 - next_unit();  // (0, 1]
        const double u2 = next_unit();
        const double z = 0.5 * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
        if (std::fabs(z) <= 1.0) return z;
    }
}

PhaselessDataset apply_noise(const PhaselessDataset& data, double delta, std::uint64_t seed, NoiseModel model) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("apply_noise: delta must be >= 0");
    PhaselessDataset out = data;
    out.provenance.delta = delta;
    out.provenance.seed = seed;
    out.provenance.noise = model;
    if (delta == 0.0) return out;
    NoiseSource src(seed, model);
    for (auto& v : out.values) v = std::max(0.0, v * (1.0 + delta * src.next()));
    return out;
}

FarFieldDataset apply_noise(const FarFieldDataset& data, double delta, std::uint64_t seed, NoiseModel model) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("apply_noise: delta must be >= 0");
    FarFieldDataset out = data;
    out.provenance.delta = delta;
    out.provenance.seed = seed;
    out.provenance.noise = model;
    if (delta == 0.0) return out;
    NoiseSource src(seed, model);
    for (auto& v : out.values) {
        const double z2 = src.next();
        const double z3 = src.next();
        v += delta * cplx(z2, z3) * std::abs(v);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

constexpr int kFormatVersion = 1;

void write_header(std::ostream& os, const char* type, const MeasurementConfig& c, const Provenance& p,
                  bool phaseless) {
    os << "# lrsi " << type << " dataset\n";
    os << "format-version = " << kFormatVersion << "\n";
    os << "type = " << type << "\n";
    os << "kind = " << p.profile_kind << "\n";
    if (!p.profile_spec.empty()) os << "profile = " << p.profile_spec << "\n";
    os << "k = " << format_double(c.k) << "\n";
    if (phaseless) {
        os << "R = " << format_double(c.R) << "\n";
        os << "M = " << c.M << "\n";
    } else {
        os << "L = " << c.L << "\n";
    }
    os << "N = " << c.N << "\n";
    os << "delta = " << format_double(p.delta) << "\n";
    os << "seed = " << p.seed << "\n";
    os << "noise-model = " << noise_model_name(p.noise) << "\n";
    os << "config-hash = " << (p.config_hash.empty() ? "none" : p.config_hash) << "\n";
    os << "data\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

struct Header {
    std::map<std::string, std::string> fields;
    std::map<std::string, std::size_t> lines;
    std::size_t data_line = 0;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Header read_header(std::istream& in, std::size_t& lineno, const std::string& expected_type) {
    Header h;
    std::string line;
    static const char* known[] = {"format-version", "type", "kind", "profile", "k", "R", "M",
                                  "L", "N", "delta", "seed", "noise-model", "config-hash"};
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t == "data") {
            h.data_line = lineno;
            break;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = trim(t.substr(0, eq));
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError("unknown header key '" + key + "'", lineno);
        h.fields[key] = trim(t.substr(eq + 1));
        h.lines[key] = lineno;
    }
    if (h.data_line == 0) throw IntegrityError("dataset file ends before the data section");
    if (h.fields["format-version"] != std::to_string(kFormatVersion))
        throw IntegrityError("unsupported or missing format-version");
    if (h.fields["type"] != expected_type) throw IntegrityError("dataset type is not '" + expected_type + "'");
    return h;
}

double parse_number(const std::string& s, std::size_t lineno) {
    const std::string t = trim(s);
    if (t.empty()) throw ParseError("empty numeric field", lineno);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ParseError("malformed number '" + t + "'", lineno);
    return v;
}

std::size_t parse_count(const Header& h, const char* key) {
    auto it = h.fields.find(key);
    if (it == h.fields.end()) throw IntegrityError(std::string("missing header field '") + key + "'");
    const std::string& s = it->second;
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw IntegrityError(std::string("header field '") + key + "' is not a count");
    return std::stoull(s);
}

double parse_header_number(const Header& h, const char* key) {
    auto it = h.fields.find(key);
    if (it == h.fields.end()) throw IntegrityError(std::string("missing header field '") + key + "'");
    return parse_number(it->second, h.lines.at(key));
}

Provenance parse_provenance(const Header& h) {
    Provenance p;
    auto get = [&](const char* key) -> std::string {
        auto it = h.fields.find(key);
        if (it == h.fields.end()) throw IntegrityError(std::string("missing header field '") + key + "'");
        return it->second;
    };
    p.profile_kind = get("kind");
    if (h.fields.count("profile")) p.profile_spec = h.fields.at("profile");
    p.delta = parse_header_number(h, "delta");
    const std::string seed = get("seed");
    if (seed.empty() || seed.find_first_not_of("0123456789") != std::string::npos)
        throw IntegrityError("header field 'seed' is not an unsigned integer");
    p.seed = std::stoull(seed);
    try {
        p.noise = noise_model_from_name(get("noise-model"));
    } catch (const DomainError& e) {
        throw IntegrityError(e.what());
    }
    p.config_hash = get("config-hash");
    if (p.config_hash == "none") p.config_hash.clear();
    return p;
}

// Reads `rows` lines of `cols` comma-separated numbers.
std::vector<double> read_rows(std::istream& in, std::size_t& lineno, std::size_t rows, std::size_t cols) {
    std::vector<double> out;
    out.reserve(rows * cols);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            throw IntegrityError("dataset truncated: expected " + std::to_string(rows) + " rows, found " +
                                 std::to_string(r));
        ++lineno;
        std::size_t count = 0;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            const std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            out.push_back(parse_number(field, lineno));
            ++count;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (count != cols)
            throw IntegrityError("row at line " + std::to_string(lineno) + " has " + std::to_string(count) +
                                 " values, header implies " + std::to_string(cols));
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) throw IntegrityError("unexpected data after the last row (line " + std::to_string(lineno) + ")");
    }
    return out;
}

}  // namespace

void save(const PhaselessDataset& data, const std::string& path) {
    data.validate();
    auto os = open_out(path);
    write_header(os, "phaseless", data.config, data.provenance, true);
    const std::size_t n = data.config.N;
    for (std::size_t i = 0; i < data.config.M; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) os << ',';
            os << format_double(data.values[i * n + j]);
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

void save(const FarFieldDataset& data, const std::string& path) {
    data.validate();
    auto os = open_out(path);
    write_header(os, "farfield", data.config, data.provenance, false);
    const std::size_t n = data.config.N;
    for (std::size_t i = 0; i < data.config.L; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) os << ',';
            const cplx v = data.values[i * n + j];
            os << format_double(v.real()) << ',' << format_double(v.imag());
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

PhaselessDataset load_phaseless(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::size_t lineno = 0;
    const Header h = read_header(in, lineno, "phaseless");
    PhaselessDataset d;
    d.config.k = parse_header_number(h, "k");
    d.config.R = parse_header_number(h, "R");
    d.config.M = parse_count(h, "M");
    d.config.N = parse_count(h, "N");
    d.provenance = parse_provenance(h);
    d.values = read_rows(in, lineno, d.config.M, d.config.N);
    d.validate();
    return d;
}

FarFieldDataset load_farfield(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::size_t lineno = 0;
    const Header h = read_header(in, lineno, "farfield");
    FarFieldDataset d;
    d.config.k = parse_header_number(h, "k");
    d.config.L = parse_count(h, "L");
    d.config.N = parse_count(h, "N");
    d.provenance = parse_provenance(h);
    const auto raw = read_rows(in, lineno, d.config.L, 2 * d.config.N);
    d.values.resize(d.config.L * d.config.N);
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = {raw[2 * i], raw[2 * i + 1]};
    d.validate();
    return d;
}

}  // namespace lrsi
