#pragma once

#include <functional>
#include <vector>

#include "lrsi/types.hpp"

namespace lrsi {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(double)>;

// (2N + 2)/lambda * (|phi(b)| + int_a^b |phi'|). Throws DomainError if
// |u'| < 1 somewhere on a probe grid of (a, b).
double vdc_bound(double a, double b, const RealFn& du, const ComplexFn& phi, const ComplexFn& dphi, double lambda,
                 int monotone_pieces);

// int_a^b e^{i gamma p(t)} q(t) dt with p increasing on (a, b) and, near a,
// p ~ p(a) + p0 (t-a)^mu + p1 (t-a)^{mu+1}, q ~ q0 (t-a)^{lambda-1} + q1 (t-a)^lambda.
struct PhaseIntegral {
    double a = 0.0;
    double b = 1.0;
    RealFn p, dp, d2p;
    ComplexFn q, dq;
    double mu = 2.0;
    double lambda = 1.0;
    double p0 = 1.0;
    double p1 = 0.0;
    cplx q0 = 1.0;
    cplx q1 = 0.0;
    double gamma = 1.0;
};

struct ExpansionResult {
    cplx value;      // full expansion (both endpoint series)
    cplx leading;    // s = 0 term at a
    cplx endpoint_b; // the series at b (already subtracted in `value`)
    double delta_bound = 0.0;
    double eps_bound = 0.0;
    cplx a0, a1;
    double bound() const { return delta_bound + eps_bound; }
};

// Coefficients of f(v) = q/p' ~ sum a_s v^{(s+lambda-mu)/mu}, v = p(t) - p(a).
cplx expansion_a0(const PhaseIntegral& pi);
cplx expansion_a1(const PhaseIntegral& pi);

// True when mu m - lambda <= n < (m+1) mu - lambda + 1.
bool admissible(const PhaseIntegral& pi, int m, int n);

// Endpoint expansion of order (m, n) with its error bounds. Only mu = 2,
// m in {0, 1} and terms up to a1 are implemented; other requests throw
// ContractError. A bound may be +inf when its ingredients diverge.
ExpansionResult stationary_expand(const PhaseIntegral& pi, int m, int n);

// Reference value of int_a^b e^{i gamma p} q dt by adaptive Gauss-Kronrod
// on a partition with at least 10 panels per local period of gamma p.
cplx oscillatory_quadrature(const PhaseIntegral& pi, double abs_tol = 1e-12);

// Leading far-zone terms of U2 and U3; x2 must be > 0 off the axis.
cplx u2_closed(const Vec2& x, const Vec2& z, double k);
cplx u3_closed(const Vec2& x, const Vec2& z, double k);
// U2 = -int_{S-} e^{ik(x.d' - z.d)} ds(d) and U3 (z replaced by z') by adaptive quadrature.
cplx u2_quadrature(const Vec2& x, const Vec2& z, double k);
cplx u3_quadrature(const Vec2& x, const Vec2& z, double k);

// e^{ik|x|}/|x|^{1/2} * (pi/N) sum_j u_inf(xhat, d_j) e^{-ik z.d_j} over
// the N midpoint directions.
cplx u1_asymptotic(const std::vector<cplx>& farfield_row, const Vec2& x, const Vec2& z, double k);

}  // namespace lrsi
