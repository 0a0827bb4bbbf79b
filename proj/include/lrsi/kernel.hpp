#pragma once

#include <array>

#include "lrsi/types.hpp"

namespace lrsi {

// Dirichlet Green's function of the half plane above x2 = c:
//   G(x, y) = Phi(x, y) - Phi(x, y*),  y* = (y1, 2c - y2),
// with Phi(x, y) = (i/4) H0(k|x - y|). No caching: every call evaluates
// the Hankel functions afresh.
class HalfPlaneKernel {
public:
    explicit HalfPlaneKernel(double k, double image_line = 0.0);

    double k() const { return k_; }
    double image_line() const { return c_; }
    Vec2 image(const Vec2& y) const { return {y.x1, 2.0 * c_ - y.x2}; }

    cplx green(const Vec2& x, const Vec2& y) const;
    // Normal derivative in y: d/dnu(y) G(x, y).
    cplx double_layer(const Vec2& x, const Vec2& y, const Vec2& nu) const;
    // double_layer - i eta green
    cplx combined(const Vec2& x, const Vec2& y, const Vec2& nu, double eta) const;
    // Gradient in x of the combined kernel.
    std::array<cplx, 2> combined_grad(const Vec2& x, const Vec2& y, const Vec2& nu, double eta) const;

    // Coefficients of e^{ik|x|}/sqrt|x| as |x| -> infinity along xhat.
    cplx green_far(const Vec2& xhat, const Vec2& y) const;
    cplx combined_far(const Vec2& xhat, const Vec2& y, const Vec2& nu, double eta) const;

    // Split of the combined kernel near the diagonal:
    //   K(x, y) = A(x, y) log|x - y| + smooth,
    // returns A (image part is smooth and contributes nothing).
    cplx combined_log_coefficient(const Vec2& x, const Vec2& y, const Vec2& nu, double eta) const;

    // Far-field constant e^{i pi/4} / sqrt(8 pi k).
    cplx far_constant() const { return gamma_; }

private:
    double k_;
    double c_;
    cplx gamma_;
};

}  // namespace lrsi
