#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <vector>

#include "lrsi/kernel.hpp"
#include "lrsi/simd.hpp"
#include "lrsi/surface.hpp"
#include "lrsi/types.hpp"

namespace lrsi {

// Plane-wave direction d = (cos a, sin a) with a in (pi, 2pi), so d2 < 0.
class IncidentDirection {
public:
    explicit IncidentDirection(double angle);
    double angle() const { return angle_; }
    Vec2 d() const { return d_; }

private:
    double angle_;
    Vec2 d_;
};

// e^{ik x.d}
cplx incident_wave(double k, const Vec2& d, const Vec2& x);
// -e^{ik x.d'} with d' = (d1, -d2)
cplx reflected_wave(double k, const Vec2& d, const Vec2& x);
// u0 = incident + reflected; exactly 0 when x2 = 0.
cplx incident_trace(double k, const Vec2& d, const Vec2& x);
// u0 at the surface point (x1, h(x1)).
cplx incident_trace(const SurfaceProfile& profile, double k, const Vec2& d, double x1);

struct SolverOptions {
    double points_per_wavelength = 10.0;
    double margin = -1.0;  // < 0 selects half a wavelength
    MeshOptions mesh;
    // Workers for the radiation-semicircle rows. Assembly itself is serial.
    int threads = 1;
};

struct LayerDensity {
    std::shared_ptr<const BoundaryMesh> mesh;
    IncidentDirection direction{1.5 * kPi};
    std::vector<cplx> values;
};

struct FieldValue {
    cplx value;
    bool near_singular = false;  // target closer to the curve than one mesh spacing
};

// Combined-field Nystrom solver on the truncated surface. The matrix is
// assembled and LU-factored once in the constructor; every method after
// that is const and safe to call concurrently.
class ForwardSolver {
public:
    ForwardSolver(SurfaceProfile profile, double k, const SolverOptions& opt = {});
    ~ForwardSolver();
    ForwardSolver(const ForwardSolver&) = delete;
    ForwardSolver& operator=(const ForwardSolver&) = delete;

    const SurfaceProfile& profile() const { return profile_; }
    double k() const { return k_; }
    double eta() const { return eta_; }
    const BoundaryMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const BoundaryMesh> mesh_ptr() const { return mesh_; }
    const HalfPlaneKernel& kernel() const { return kernel_; }
    // Flat profile: zero density, zero scattered field.
    bool trivial() const { return trivial_; }
    std::size_t unknowns() const { return trivial_ ? 0 : mesh_->size(); }
    // Reciprocal of the LU condition estimate (1 for the trivial solver).
    double rcond() const { return rcond_; }

    LayerDensity solve(const IncidentDirection& d) const;
    std::vector<LayerDensity> solve(const std::vector<IncidentDirection>& ds) const;
    // max_i |(A psi)_i + u0(x_i)|
    double residual(const LayerDensity& density) const;
    // Right-hand side -u0 at the mesh nodes.
    std::vector<cplx> rhs(const IncidentDirection& d) const;

    // Density interpolated at x1 on the mesh.
    cplx density_at(const LayerDensity& density, double x1) const;

    FieldValue scattered_near(const LayerDensity& density, const Vec2& x) const;
    // u^s at (x1, h(x1)) from the jump relation.
    cplx boundary_trace(const LayerDensity& density, double x1) const;
    // Requires xhat2 > 0.
    cplx far_field(const LayerDensity& density, const Vec2& xhat) const;
    double total_field_magnitude(const LayerDensity& density, const Vec2& x) const;

    // Linear functionals on the nodal density. Each returns one weight per node.
    std::vector<cplx> potential_row(const Vec2& x, bool* near_singular = nullptr) const;
    std::array<std::vector<cplx>, 2> gradient_rows(const Vec2& x) const;
    std::vector<cplx> trace_row(double x1) const;
    std::vector<cplx> far_row(const Vec2& xhat) const;

    // Radiation semicircle used for fields far from the surface when the
    // mesh has tapered tails. Rows give u^s and d_r u^s at its nodes.
    struct Sigma {
        double radius = 0.0;
        std::vector<Vec2> nodes;
        std::vector<double> weights;
        simd::SplitMatrix value_rows;   // nodes x unknowns
        simd::SplitMatrix normal_rows;  // nodes x unknowns
    };
    bool uses_sigma() const { return !trivial_ && mesh_->has_tails(); }
    const Sigma& sigma() const;
    // Points at least this far from the origin are evaluated through sigma.
    double sigma_threshold() const;
    // Weights over (u, d_r u) at the sigma nodes: first half values, second half normals.
    std::vector<cplx> sigma_field_row(const Vec2& x) const;
    std::vector<cplx> sigma_far_row(const Vec2& xhat) const;

    // Check that x lies in the closure of D+. Returns true when x is on the curve.
    bool classify(const Vec2& x) const;

private:
    struct Impl;
    void assemble();
    void check_density(const LayerDensity& density) const;

    SurfaceProfile profile_;
    double k_;
    double eta_;
    SolverOptions opt_;
    std::shared_ptr<const BoundaryMesh> mesh_;
    HalfPlaneKernel kernel_;
    HalfPlaneKernel axis_kernel_;  // image about x2 = 0, used on the semicircle
    bool trivial_ = false;
    double rcond_ = 1.0;
    std::unique_ptr<Impl> impl_;
    mutable std::once_flag sigma_once_;
    mutable std::unique_ptr<Sigma> sigma_;
};

// Solved densities for a fixed direction set plus batched field evaluation.
// Matrices returned have one row per point and one column per direction.
class ScatteringState {
public:
    ScatteringState(std::shared_ptr<const ForwardSolver> solver, std::vector<IncidentDirection> directions,
                    int threads = 1);

    const ForwardSolver& solver() const { return *solver_; }
    std::shared_ptr<const ForwardSolver> solver_ptr() const { return solver_; }
    const std::vector<IncidentDirection>& directions() const { return dirs_; }
    std::size_t num_directions() const { return dirs_.size(); }
    double k() const { return solver_->k(); }
    int threads() const { return threads_; }

    simd::SplitMatrix scattered(const std::vector<Vec2>& xs) const;
    simd::SplitMatrix far_field(const std::vector<Vec2>& xhats) const;
    std::vector<cplx> scattered_at(const Vec2& x) const;
    std::vector<cplx> boundary_trace(double x1) const;
    LayerDensity density(std::size_t j) const;

private:
    std::shared_ptr<const ForwardSolver> solver_;
    std::vector<IncidentDirection> dirs_;
    int threads_;
    simd::SplitMatrix psi_;    // unknowns x N
    simd::SplitMatrix sigma_;  // 2 * sigma nodes x N (values then normal derivatives)
};

// Midpoint layouts used throughout: theta_i = pi (i - 1/2) / M on the upper
// half circle, and pi + pi (j - 1/2) / N for incident directions.
std::vector<IncidentDirection> midpoint_directions(std::size_t n);
std::vector<Vec2> midpoint_upper_directions(std::size_t n);

}  // namespace lrsi
