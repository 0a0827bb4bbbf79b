#pragma once

#include "lrsi/types.hpp"

namespace lrsi {

// Cylinder functions of orders 0 and 1 for real arguments.
// Power series (extended precision) below the crossover, Hankel asymptotic
// expansion above it.

double bessel_j0(double x);
double bessel_j1(double x);
// Y0, Y1 require x > 0.
double bessel_y0(double x);
double bessel_y1(double x);

// H_n^(1)(x) for n in {0, 1}, x > 0.
cplx hankel1(int order, double x);

struct Hankel01 {
    cplx h0;
    cplx h1;
};

// Both orders at once; this is what the layer-potential kernels call.
Hankel01 hankel1_01(double x);

struct Bessel01 {
    double j0;
    double j1;
};
Bessel01 bessel_j01(double x);

// Argument above which the asymptotic branch is used.
inline constexpr double kBesselCrossover = 16.0;

}  // namespace lrsi
