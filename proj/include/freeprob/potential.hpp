#pragma once

#include <functional>
#include <string>
#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob {

enum class ClosedFormTag { QuadraticR, CosineT, LinearHalfLine, Custom };

struct PotentialSpec {
  DomainKind domain = DomainKind::RealLine;
  std::function<double(double)> Q;
  std::function<double(double)> Qprime;   // theta-derivative on the circle
  std::function<double(double)> Qsecond;  // optional
  double rho = 0.0;
  ClosedFormTag tag = ClosedFormTag::Custom;
  double param = 0.0;   // rho, lambda, or rho for the three families
  double offset = 0.0;  // center (quadratic) or phase (cosine)
  std::string label;

  double second(double x) const;
};

PotentialSpec quadratic_potential(double rho, double center = 0.0);
// Q(e^{i theta}) = -(2/lambda) cos(theta - phase); lambda = inf gives Q = 0.
PotentialSpec cosine_potential(double lambda, double phase = 0.0);
PotentialSpec zero_circle_potential();
PotentialSpec linear_halfline_potential(double rho);
PotentialSpec custom_potential(DomainKind domain, std::function<double(double)> q,
                               std::function<double(double)> dq, double rho, std::string label,
                               std::function<double(double)> d2q = {});
// Tabulated Q with derivative column; linear interpolation between nodes.
PotentialSpec tabulated_potential(DomainKind domain, std::vector<double> x, std::vector<double> q,
                                  std::vector<double> dq, double rho, std::string label);
PotentialSpec load_potential_file(const std::string& path);
// Q_eps = Q * bump_eps, by Gauss-Legendre quadrature.
PotentialSpec mollify_potential(const PotentialSpec& q, double eps);
// Q~(x) = Q(x^2)/2 on the line, for a half-line potential.
PotentialSpec symmetrized_potential(const PotentialSpec& q);

// Parses quadratic:rho=..[,center=..], cosine:lambda=..[,phase=..], linear-halfline:rho=..,
// zero-circle, file:<path>.
PotentialSpec parse_potential(const std::string& spec);

// Minimum of second differences of Q(x) - (rho/2) x^2 over a grid of the interval.
double convexity_defect(const PotentialSpec& q, double rho, double a, double b, int points = 2001);

// Default truncation window for solving on the line.
Domain default_window(const PotentialSpec& q);

}  // namespace freeprob
