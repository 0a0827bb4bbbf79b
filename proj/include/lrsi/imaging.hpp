#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lrsi/dataset.hpp"
#include "lrsi/forward.hpp"

namespace lrsi {

struct SamplingGrid {
    double x1_min = -1.0;
    double x1_max = 1.0;
    double x2_min = -0.5;
    double x2_max = 0.5;
    std::size_t n1 = 201;  // columns (x1)
    std::size_t n2 = 101;  // rows (x2)

    double dx1() const { return (x1_max - x1_min) / static_cast<double>(n1 - 1); }
    double dx2() const { return (x2_max - x2_min) / static_cast<double>(n2 - 1); }
    double x1(std::size_t c) const { return x1_min + dx1() * static_cast<double>(c); }
    double x2(std::size_t r) const { return x2_min + dx2() * static_cast<double>(r); }
    Vec2 point(std::size_t r, std::size_t c) const { return {x1(c), x2(r)}; }
    std::size_t size() const { return n1 * n2; }
    // Row-major points: index = r * n1 + c.
    std::vector<Vec2> points() const;
    void validate() const;
    // True when the perturbed part of the profile lies strictly inside.
    bool covers(const SurfaceProfile& profile) const;
};

// Support padded by 0.3 in x1, [min h - 0.2, max h + 0.2] in x2, 201 x 101.
SamplingGrid default_grid(const SurfaceProfile& profile);

enum class IndicatorKind { phaseless, full };
const char* indicator_name(IndicatorKind kind);

struct SurfacePoint {
    double x1 = 0.0;
    double x2 = 0.0;
    bool flagged = false;  // maximum on the grid edge
};

struct ImagingResult {
    IndicatorKind kind = IndicatorKind::phaseless;
    SamplingGrid grid;
    std::vector<double> values;  // n2 x n1, row-major
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<SurfacePoint> surface;

    double at(std::size_t r, std::size_t c) const { return values[r * grid.n1 + c]; }
};

// Single-point evaluations.
double indicator_phaseless(const PhaselessDataset& data, const Vec2& z);
double indicator_full(const FarFieldDataset& data, const Vec2& z);

// Batched over points through the dispatched complex GEMM.
std::vector<double> indicator_phaseless(const PhaselessDataset& data, const std::vector<Vec2>& zs,
                                        int threads = 1);
std::vector<double> indicator_full(const FarFieldDataset& data, const std::vector<Vec2>& zs, int threads = 1);

ImagingResult image_phaseless(const PhaselessDataset& data, const SamplingGrid& grid, int threads = 1);
ImagingResult image_full(const FarFieldDataset& data, const SamplingGrid& grid, int threads = 1);

// Integrand pieces over the incident directions of `state`, midpoint rule.
std::array<cplx, 3> u_components(const ScatteringState& state, const Vec2& x, const Vec2& z);
std::array<cplx, 4> w_components(const ScatteringState& state, const Vec2& x, const Vec2& z);
// Inner direction sum of the phaseless indicator computed from the solver
// fields directly: (pi/N) sum_j [(|u|^2 - 2 + e^{2ik x2 d2}) e^{ik(x-z).d} - e^{ik(x'-z').d}].
cplx phaseless_bracket(const ScatteringState& state, const Vec2& x, const Vec2& z);

// Integral of |U(x,z)|^2 over M midpoint receivers on the half circle of radius R.
std::vector<double> f_r(const ScatteringState& state, double R, std::size_t M, const std::vector<Vec2>& zs);
double f_r(const ScatteringState& state, double R, std::size_t M, const Vec2& z);
// Same functional as the full-data indicator.
double f0(const FarFieldDataset& data, const Vec2& z);

// |U(x,z) + 2 pi J0(k|x - z|)| at x = (x1, h(x1)).
double boundary_identity_check(const ScatteringState& state, double x1, const Vec2& z);

// Column-wise arg max with a three-point parabolic refinement, for columns
// with x1 in [window.lo, window.hi].
std::vector<SurfacePoint> extract_surface(const ImagingResult& result, const Interval& window);

// Fraction of columns in `window` whose estimate is within `tol` of h(x1);
// flagged points count as misses.
double surface_hit_rate(const std::vector<SurfacePoint>& pts, const SurfaceProfile& profile, double tol);

// Pearson correlation of two equally sized grids.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

void write_grid_csv(const ImagingResult& result, const std::string& path);
ImagingResult read_grid_csv(const std::string& path);
// 8-bit binary PGM, linear min-max scaling, top row = largest x2.
void write_pgm(const ImagingResult& result, const std::string& path);
void write_polyline_csv(const ImagingResult& result, const std::string& path);

}  // namespace lrsi
