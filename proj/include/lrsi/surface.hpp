#pragma once

#include <string>
#include <vector>

#include "lrsi/types.hpp"

namespace lrsi {

enum class ProfileKind { flat, spline_bumps, piecewise_linear, multiscale, tabulated };

const char* kind_name(ProfileKind kind);
ProfileKind kind_from_name(const std::string& name);

// amplitude * phi((x1 - center) / width), phi the centred quartic B-spline
// supported on [-5/2, 5/2].
struct Bump {
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
};

// A exp(W^2/(x^2 - W^2)) (B + C sin(w1 x)) sin(w0 x) for |x| < W, else 0.
struct MultiscaleParams {
    double amplitude = 0.3;
    double half_width = 0.8;
    double base = 0.5;
    double ripple = 0.1;
    double ripple_frequency = 16.0 * kPi;
    double frequency = kPi;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Quartic B-spline used by the spline_bumps kind, and its derivatives.
double bspline4(double x);
double bspline4_d1(double x);
double bspline4_d2(double x);

class SurfaceProfile {
public:
    static SurfaceProfile flat();
    static SurfaceProfile spline_bumps(std::vector<Bump> bumps);
    // Nodes sorted by x1; height is zero outside the node range.
    static SurfaceProfile piecewise_linear(std::vector<Vec2> nodes);
    static SurfaceProfile multiscale(const MultiscaleParams& p);
    // order 1: linear interpolation, order 3: natural cubic spline.
    static SurfaceProfile tabulated(std::vector<double> x, std::vector<double> h, int order = 3);
    static SurfaceProfile tabulated_csv(const std::string& path, int order = 3);

    // Two bumps, one raised and one sunken.
    static SurfaceProfile example1();
    // Single tent.
    static SurfaceProfile example2();
    // Exponential cutoff times a rippled sine.
    static SurfaceProfile example3();

    ProfileKind kind() const { return kind_; }
    const std::vector<Bump>& bumps() const { return bumps_; }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    const MultiscaleParams& multiscale_params() const { return ms_; }
    const std::vector<double>& table_x() const { return tx_; }
    const std::vector<double>& table_h() const { return th_; }
    int table_order() const { return order_; }

    // Tabulated profiles throw DomainError outside the table.
    double height(double x1) const;
    // At piecewise-linear corners the right-hand slope is returned.
    double derivative(double x1) const;
    double second_derivative(double x1) const;

    // Whether height() accepts x1 (only tabulated profiles have a bounded domain).
    bool covers(double x1) const;
    // height() inside the table, the flat line outside. Used by the mesh.
    double height_or_flat(double x1) const;
    double derivative_or_flat(double x1) const;
    double second_derivative_or_flat(double x1) const;

    bool is_flat() const { return flat_; }
    // Minimal closed interval containing {h != 0}; [0, 0] for the flat kind.
    Interval support() const { return support_; }
    double min_height() const { return hmin_; }
    double max_height() const { return hmax_; }
    // Points where h'' (or h') jumps; mesh panels end on these.
    const std::vector<double>& breakpoints() const { return breaks_; }
    // Breakpoints where h' itself jumps.
    const std::vector<double>& corners() const { return corners_; }

private:
    SurfaceProfile() = default;
    void finalize();
    double raw(double x1, int order) const;
    std::size_t table_segment(double x1) const;

    ProfileKind kind_ = ProfileKind::flat;
    std::vector<Bump> bumps_;
    std::vector<Vec2> nodes_;
    MultiscaleParams ms_;
    std::vector<double> tx_, th_, tm_;  // tm_: spline second derivatives
    int order_ = 3;

    bool flat_ = true;
    Interval support_;
    double hmin_ = 0.0, hmax_ = 0.0;
    std::vector<double> breaks_;
    std::vector<double> corners_;
};

struct MeshOptions {
    // Flat extension (in wavelengths) added on each side of a non-flat
    // profile; the outer half is tapered to zero.
    double tail_wavelengths = 4.0;
    // Image line sits this far (in wavelengths) below min(min h, 0).
    double image_offset_wavelengths = 0.25;
    // Dyadic refinement levels toward each corner of a Lipschitz profile.
    int corner_levels = 8;
};

struct Panel {
    double t0 = 0.0;  // x1 range
    double t1 = 0.0;
    double mid() const { return 0.5 * (t0 + t1); }
    double half() const { return 0.5 * (t1 - t0); }
};

// Gauss-Legendre panels (16 nodes each) over the truncated curve.
struct BoundaryMesh {
    double k = 0.0;
    double points_per_wavelength = 0.0;
    double margin = 0.0;
    Interval range;            // covered x1 interval
    double image_line = 0.0;   // reflection line x2 = c of the kernel
    double taper = 0.0;        // width of the window ramp at each end (0: none)
    bool flat = false;
    bool degenerate = false;
    double max_spacing = 0.0;  // largest distance between consecutive nodes

    std::vector<Panel> panels;
    // Per node, panel-major.
    std::vector<double> t;
    std::vector<Vec2> points;
    std::vector<Vec2> normals;
    std::vector<double> weights;  // arc-length quadrature weights
    std::vector<double> jacobian;
    std::vector<double> curvature;  // h'' / J^3
    std::vector<double> window;

    std::size_t size() const { return points.size(); }
    double wavelength() const { return 2.0 * kPi / k; }
    bool has_tails() const { return taper > 0.0; }
    double arc_length() const;
    // Window factor at x1 (1 away from the ends).
    double window_at(double x1) const;
    // Panel containing x1 (the left one on a shared edge); -1 outside.
    int panel_of(double x1) const;
};

double smooth_window(double x1, const Interval& range, double taper);

BoundaryMesh build_mesh(const SurfaceProfile& profile, double k, double points_per_wavelength,
                        double margin, const MeshOptions& opt = {});

// Default margin: half a wavelength.
inline double default_margin(double k) { return 0.5 * 2.0 * kPi / k; }

}  // namespace lrsi
