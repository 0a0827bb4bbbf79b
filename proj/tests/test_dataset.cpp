#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lrsi/dataset.hpp"

using namespace lrsi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

PhaselessDataset random_phaseless(std::size_t m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    PhaselessDataset d;
    d.config = {7.5, 2.25, m, n, 0};
    d.provenance.profile_kind = "spline_bumps";
    d.provenance.delta = 0.125;
    d.provenance.seed = 987654321012345ULL;
    d.provenance.config_hash = "00112233aabbccdd";
    for (std::size_t i = 0; i < m * n; ++i) d.values.push_back(u(g) / 3.0 * std::exp(u(g)));
    return d;
}

const PhaselessDataset& example1_phaseless() {
    static const PhaselessDataset d = [] {
        MeasurementConfig mc{10.0, 3.0, 8, 6, 0};
        return synthesize_phaseless(SurfaceProfile::example1(), mc);
    }();
    return d;
}

}  // namespace

TEST_CASE("measurement layouts use midpoint angles") {
    MeasurementConfig c{10.0, 2.0, 16, 12, 9};
    const auto rx = c.receivers();
    REQUIRE(rx.size() == 16);
    CHECK(std::atan2(rx[0].x2, rx[0].x1) == doctest::Approx(kPi / 32.0));
    CHECK(norm(rx[5]) == doctest::Approx(2.0));
    CHECK(std::atan2(rx[15].x2, rx[15].x1) == doctest::Approx(kPi - kPi / 32.0));
    const auto ds = c.directions();
    REQUIRE(ds.size() == 12);
    CHECK(ds[0].angle() == doctest::Approx(kPi + kPi / 24.0));
    const auto ob = c.observation_directions();
    REQUIRE(ob.size() == 9);
    for (const auto& x : ob) CHECK(x.x2 > 0.0);
}

TEST_CASE("flat profile data have closed forms") {
    MeasurementConfig c{10.0, 2.0, 64, 64, 64};
    const auto pl = synthesize_phaseless(SurfaceProfile::flat(), c);
    const auto rx = c.receivers();
    const auto ds = c.directions();
    double worst = 0.0;
    for (std::size_t i = 0; i < c.M; ++i)
        for (std::size_t j = 0; j < c.N; ++j)
            worst = std::max(worst, std::fabs(pl.at(i, j) - 2.0 * std::fabs(std::sin(c.k * rx[i].x2 * ds[j].d().x2))));
    CHECK(worst <= 1e-10);
    const auto ff = synthesize_farfield(SurfaceProfile::flat(), c);
    for (const cplx v : ff.values) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("example 1 synthesis shape, sign and reciprocity") {
    const auto& d = example1_phaseless();
    CHECK(d.values.size() == 48);
    for (double v : d.values) CHECK(v >= 0.0);
    CHECK(d.provenance.profile_kind == "spline_bumps");

    MeasurementConfig fc{10.0, 0.0, 0, 10, 10};
    const auto ff = synthesize_farfield(SurfaceProfile::example1(), fc);
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) {
            scale = std::max(scale, std::abs(ff.at(i, j)));
            err = std::max(err, std::abs(ff.at(i, j) - ff.at(j, i)));
        }
    CHECK(err <= 1e-3 * scale);
}

TEST_CASE("phaseless entries ignore a global phase of the field") {
    MeasurementConfig mc{10.0, 3.0, 8, 6, 0};
    SynthOptions opt;
    opt.total_field_phase = std::exp(cplx(0.0, 1.234));
    const auto rotated = synthesize_phaseless(SurfaceProfile::example1(), mc, opt);
    const auto& base = example1_phaseless();
    for (std::size_t i = 0; i < base.values.size(); ++i)
        CHECK(std::fabs(rotated.values[i] - base.values[i]) <= 1e-12);
}

TEST_CASE("synthesis is deterministic across thread counts") {
    MeasurementConfig mc{10.0, 3.0, 8, 6, 0};
    SynthOptions opt;
    opt.threads = 2;
    const auto again = synthesize_phaseless(SurfaceProfile::example1(), mc, opt);
    CHECK(again.values == example1_phaseless().values);
}

TEST_CASE("noise source statistics") {
    NoiseSource src(2024, NoiseModel::uniform);
    double sum = 0.0, lo = 1.0, hi = -1.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double z = src.next();
        sum += z;
        lo = std::min(lo, z);
        hi = std::max(hi, z);
    }
    CHECK(std::fabs(sum / n) <= 3e-3);
    CHECK(lo >= -1.0);
    CHECK(hi <= 1.0);
    CHECK(hi - lo > 1.99);

    NoiseSource gauss(2024, NoiseModel::truncated_gaussian);
    double gsum = 0.0, gsq = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double z = gauss.next();
        REQUIRE(std::fabs(z) <= 1.0);
        gsum += z;
        gsq += z * z;
    }
    CHECK(std::fabs(gsum / 200000) <= 5e-3);
    // Variance of N(0, 1/4) truncated to [-1, 1] is about 0.1939.
    CHECK(gsq / 200000 == doctest::Approx(0.1939).epsilon(0.02));
}

TEST_CASE("noise maps follow the multiplicative model exactly") {
    const auto d = random_phaseless(5, 7, 1);
    const auto noisy = apply_noise(d, 0.4, 99);
    NoiseSource src(99, NoiseModel::uniform);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double z = src.next();
        CHECK(noisy.values[i] == std::max(0.0, d.values[i] * (1.0 + 0.4 * z)));
        worst = std::max(worst, std::fabs(noisy.values[i] - d.values[i]) / d.values[i]);
    }
    CHECK(worst <= 0.4);
    CHECK(noisy.provenance.delta == 0.4);
    CHECK(noisy.provenance.seed == 99);
    CHECK(apply_noise(d, 0.4, 99).values == noisy.values);
    CHECK(apply_noise(d, 0.4, 100).values != noisy.values);

    FarFieldDataset f;
    f.config = {5.0, 0.0, 0, 3, 4};
    for (int i = 0; i < 12; ++i) f.values.push_back({0.1 * i - 0.5, 0.3 - 0.05 * i});
    const auto fn = apply_noise(f, 0.2, 5);
    NoiseSource fs(5, NoiseModel::uniform);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double z2 = fs.next();
        const double z3 = fs.next();
        CHECK(fn.values[i] == f.values[i] + 0.2 * cplx(z2, z3) * std::abs(f.values[i]));
    }
}

TEST_CASE("zero noise returns a bit-exact copy") {
    const auto d = random_phaseless(4, 4, 2);
    const auto same = apply_noise(d, 0.0, 7);
    CHECK(same.values == d.values);
    CHECK_THROWS_AS(apply_noise(d, -0.1, 7), DomainError);
}

TEST_CASE("save and load round trip") {
    const auto d = random_phaseless(3, 4, 3);
    const std::string path = "dataset_rt.pld";
    save(d, path);
    const auto back = load_phaseless(path);
    CHECK(back.values == d.values);
    CHECK(back.config.k == d.config.k);
    CHECK(back.config.R == d.config.R);
    CHECK(back.config.M == 3);
    CHECK(back.config.N == 4);
    CHECK(back.provenance.delta == d.provenance.delta);
    CHECK(back.provenance.seed == d.provenance.seed);
    CHECK(back.provenance.profile_kind == "spline_bumps");
    CHECK(back.provenance.config_hash == d.provenance.config_hash);
    // Saving the loaded copy reproduces the file byte for byte.
    save(back, "dataset_rt2.pld");
    CHECK(slurp(path) == slurp("dataset_rt2.pld"));
    const std::string text = slurp(path);
    for (const char* key : {"kind = ", "k = ", "R = ", "M = ", "N = ", "delta = ", "seed = ", "format-version = "})
        CHECK(text.find(key) != std::string::npos);

    FarFieldDataset f;
    f.config = {5.0, 0.0, 0, 3, 2};
    for (int i = 0; i < 6; ++i) f.values.push_back({std::sqrt(2.0) * i, -1.0 / (i + 3.0)});
    save(f, "dataset_rt.ffd");
    const auto fb = load_farfield("dataset_rt.ffd");
    CHECK(fb.values == f.values);
    CHECK(fb.config.L == 2);
    CHECK_THROWS_AS(load_phaseless("dataset_rt.ffd"), IntegrityError);
    std::remove(path.c_str());
    std::remove("dataset_rt2.pld");
    std::remove("dataset_rt.ffd");
}

TEST_CASE("malformed files are rejected") {
    const auto d = random_phaseless(3, 4, 4);
    const std::string path = "dataset_bad.pld";
    save(d, path);
    const std::string text = slurp(path);

    spit(path, text.substr(0, text.size() - 30));
    CHECK_THROWS_AS(load_phaseless(path), IntegrityError);

    spit(path, text.substr(0, text.find("data\n")));
    CHECK_THROWS_AS(load_phaseless(path), IntegrityError);

    spit(path, text + "1,2,3,4\n");
    CHECK_THROWS_AS(load_phaseless(path), IntegrityError);

    std::string bad_num = text;
    bad_num.replace(bad_num.find("k = "), 4, "k = x");
    spit(path, bad_num);
    try {
        load_phaseless(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() > 1);
    }

    std::string bad_key = text;
    bad_key.replace(bad_key.find("seed"), 4, "sead");
    spit(path, bad_key);
    CHECK_THROWS_AS(load_phaseless(path), ParseError);

    std::string bad_cell = text;
    const auto pos = bad_cell.find('\n', bad_cell.find("data\n") + 5);
    bad_cell.insert(pos, "abc");
    spit(path, bad_cell);
    CHECK_THROWS_AS(load_phaseless(path), ParseError);
    std::remove(path.c_str());
}

TEST_CASE("configuration errors") {
    MeasurementConfig inside{10.0, 0.5, 4, 4, 0};
    CHECK_THROWS_AS(synthesize_phaseless(SurfaceProfile::example1(), inside), DomainError);
    MeasurementConfig no_dirs{10.0, 3.0, 4, 0, 0};
    CHECK_THROWS_AS(synthesize_phaseless(SurfaceProfile::example1(), no_dirs), DomainError);
    CHECK_THROWS_AS(noise_model_from_name("laplace"), DomainError);
    CHECK(noise_model_from_name("truncated_gaussian") == NoiseModel::truncated_gaussian);
    CHECK(circumradius(SurfaceProfile::example1()) == doctest::Approx(0.95).epsilon(1e-3));

    auto solver = std::make_shared<const ForwardSolver>(SurfaceProfile::example1(), 10.0);
    ScatteringState st(solver, midpoint_directions(3));
    MeasurementConfig mismatch{10.0, 3.0, 4, 5, 0};
    CHECK_THROWS_AS(synthesize_phaseless(st, mismatch), ContractError);

    PhaselessDataset neg = random_phaseless(2, 2, 5);
    neg.values[1] = -1.0;
    CHECK_THROWS_AS(neg.validate(), IntegrityError);
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(g) * std::exp(u(g) / 100.0);
        CHECK(std::stod(format_double(v)) == v);
    }
}
