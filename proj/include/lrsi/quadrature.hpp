#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lrsi/types.hpp"

namespace lrsi::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// P_0..P_{n-1} at x.
void legendre_values(double x, int n, double* out);

// Fixed 16-point panel rule plus the tables used for interpolation and
// log-singular product integration on a panel.
class PanelRule {
public:
    static constexpr int P = 16;
    static const PanelRule& instance();

    const std::array<double, P>& nodes() const { return nodes_; }
    const std::array<double, P>& weights() const { return weights_; }

    // Lagrange basis through the nodes evaluated at s in [-1, 1] (or beyond).
    std::array<double, P> interpolation_weights(double s) const;
    // w_j with sum_j w_j f(s_j) ~= int_{-1}^{1} log|t - s| f(s) ds for any real t.
    std::array<double, P> log_weights(double t) const;

    // Legendre moments int_{-1}^{1} log|t - s| P_n(s) ds, n < P.
    static std::array<double, P> log_moments(double t);

private:
    PanelRule();
    std::array<double, P> nodes_{};
    std::array<double, P> weights_{};
    // Inverse Legendre Vandermonde: coefficients c = vinv * f(nodes).
    std::array<std::array<double, P>, P> vinv_{};
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(double)>;

struct AdaptiveOptions {
    double abs_tol = 1e-12;
    double rel_tol = 0.0;
    int max_intervals = 2'000'000;
};

struct AdaptiveResult {
    cplx value;
    double error_estimate;
    int intervals;
    bool converged;
};

// Adaptive Gauss-Kronrod (7/15). `breaks` is the initial partition
// (at least two increasing points).
AdaptiveResult gauss_kronrod(const ComplexFn& f, const std::vector<double>& breaks,
                             const AdaptiveOptions& opt = {});
double gauss_kronrod_real(const RealFn& f, double a, double b, const AdaptiveOptions& opt = {});

}  // namespace lrsi::quad
