#include "lrsi/kernel.hpp"

#include "lrsi/specialfun.hpp"

namespace lrsi {

HalfPlaneKernel::HalfPlaneKernel(double k, double image_line) : k_(k), c_(image_line) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("HalfPlaneKernel: k must be positive");
    gamma_ = std::polar(1.0 / std::sqrt(8.0 * kPi * k), kPi / 4.0);
}

cplx HalfPlaneKernel::green(const Vec2& x, const Vec2& y) const {
    const double r = norm(x - y);
    const double ri = norm(x - image(y));
    return cplx(0.0, 0.25) * (hankel1(0, k_ * r) - hankel1(0, k_ * ri));
}

cplx HalfPlaneKernel::double_layer(const Vec2& x, const Vec2& y, const Vec2& nu) const {
    const Vec2 d = x - y;
    const Vec2 di = x - image(y);
    const double r = norm(d), ri = norm(di);
    const Vec2 nur = mirror(nu);
    return cplx(0.0, 0.25 * k_) *
           (hankel1(1, k_ * r) * (dot(d, nu) / r) - hankel1(1, k_ * ri) * (dot(di, nur) / ri));
}

cplx HalfPlaneKernel::combined(const Vec2& x, const Vec2& y, const Vec2& nu, double eta) const {
    const Vec2 d = x - y;
    const Vec2 di = x - image(y);
    const double r = norm(d), ri = norm(di);
    const auto h = hankel1_01(k_ * r);
    const auto hi = hankel1_01(k_ * ri);
    const Vec2 nur = mirror(nu);
    const cplx dl = cplx(0.0, 0.25 * k_) * (h.h1 * (dot(d, nu) / r) - hi.h1 * (dot(di, nur) / ri));
    const cplx sl = cplx(0.0, 0.25) * (h.h0 - hi.h0);
    return dl - cplx(0.0, eta) * sl;
}

std::array<cplx, 2> HalfPlaneKernel::combined_grad(const Vec2& x, const Vec2& y, const Vec2& nu,
                                                   double eta) const {
    std::array<cplx, 2> g{0.0, 0.0};
    auto add = [&](const Vec2& src, const Vec2& n, double sign) {
        const Vec2 d = x - src;
        const double r = norm(d);
        const auto h = hankel1_01(k_ * r);
        // f = H1(kr)/r, f' = k H0/r - 2 H1/r^2
        const cplx f = h.h1 / r;
        const cplx fp = k_ * h.h0 / r - 2.0 * h.h1 / (r * r);
        const double dn = dot(d, n);
        const cplx ik4(0.0, 0.25 * k_);
        // grad_x of (ik/4) f (d . n)
        const cplx a = ik4 * fp * dn / r;
        const cplx gd1 = a * d.x1 + ik4 * f * n.x1;
        const cplx gd2 = a * d.x2 + ik4 * f * n.x2;
        // grad_x Phi = -(ik/4) H1 d / r
        const cplx gs1 = -ik4 * h.h1 * d.x1 / r;
        const cplx gs2 = -ik4 * h.h1 * d.x2 / r;
        const cplx ie(0.0, eta);
        g[0] += sign * (gd1 - ie * gs1);
        g[1] += sign * (gd2 - ie * gs2);
    };
    add(y, nu, 1.0);
    add(image(y), mirror(nu), -1.0);
    return g;
}

cplx HalfPlaneKernel::green_far(const Vec2& xhat, const Vec2& y) const {
    const Vec2 yi = image(y);
    return gamma_ * (std::polar(1.0, -k_ * dot(xhat, y)) - std::polar(1.0, -k_ * dot(xhat, yi)));
}

cplx HalfPlaneKernel::combined_far(const Vec2& xhat, const Vec2& y, const Vec2& nu, double eta) const {
    const Vec2 yi = image(y);
    const cplx e = std::polar(1.0, -k_ * dot(xhat, y));
    const cplx ei = std::polar(1.0, -k_ * dot(xhat, yi));
    const cplx mik(0.0, -k_);
    const cplx dl = mik * (dot(xhat, nu) * e - dot(xhat, mirror(nu)) * ei);
    const cplx sl = e - ei;
    return gamma_ * (dl - cplx(0.0, eta) * sl);
}

cplx HalfPlaneKernel::combined_log_coefficient(const Vec2& x, const Vec2& y, const Vec2& nu,
                                               double eta) const {
    const Vec2 d = x - y;
    const double r = norm(d);
    const auto j = bessel_j01(k_ * r);
    const double as = -j.j0 / (2.0 * kPi);
    const double ad = r > 0.0 ? -(k_ / (2.0 * kPi)) * j.j1 * dot(d, nu) / r : 0.0;
    return cplx(ad, 0.0) - cplx(0.0, eta) * as;
}

}  // namespace lrsi
