#pragma once

#include <utility>
#include <vector>

namespace freeprob {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule with m nodes (cached, thread safe).
const GaussRule& gauss_legendre(int m);

// Clausen functions Cl2(t) = sum sin(kt)/k^2 and Cl3(t) = sum cos(kt)/k^3.
double clausen2(double t);
double clausen3(double t);

// Antiderivatives for the line log kernel.
// log_int1(u) = u log|u| - u   (d/du = log|u|)
// log_int2(u) = u^2/2 log|u| - 3u^2/4   (second antiderivative)
double log_int1(double u);
double log_int2(double u);

// Exact double integral of log|x-y| over [a1,b1]x[a2,b2].
double log_cell_pair(double a1, double b1, double a2, double b2);

// Exact double integral of log|2 sin((s-t)/2)| over [a1,b1]x[a2,b2].
double logsin_cell_pair(double a1, double b1, double a2, double b2);

// Average of log|x-y| over [0,1]x[k,k+1], k >= 0.
double unit_cell_log_average(long k);

// Normalized bump exp(-1/(1-x^2)) on (-1,1), unit mass.
double bump(double x);
double bump_normalizer();

double riemann_zeta_even(int two_n);

}  // namespace freeprob
