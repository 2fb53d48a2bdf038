#pragma once

#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob {

// LineUnnormalized: (Hp)(x) = p.v. int p(t)/(x-t) dt, which is pi times the usual transform.
// CircleCotangent: (Hp)(theta) = p.v. int p(t) cot((theta-t)/2) dt/2pi.
enum class HilbertConvention { LineUnnormalized, CircleCotangent };

struct HilbertResult {
  std::vector<double> points;  // cell midpoints
  std::vector<double> values;
  std::vector<char> flagged;   // nonzero where the value is extrapolated or unreliable
  HilbertConvention convention = HilbertConvention::LineUnnormalized;
};

// Fourier multiplier -i pi sign(k) on an 8x zero-padded extension, with an analytic
// correction for the periodization.
HilbertResult hilbert_R(const GridMeasure& mu);
// Odd-offset trapezoid rule for the principal value.
HilbertResult hilbert_R_pv(const GridMeasure& mu);

HilbertResult hilbert_T(const GridMeasure& mu);
// Odd-offset cot-kernel quadrature; needs an even cell count.
HilbertResult hilbert_T_pv(const GridMeasure& mu);

// Via the symmetrized measure: (Hf)(y) = (H f~)(sqrt y)/sqrt y.
HilbertResult hilbert_halfline(const GridMeasure& mu);
// Transform of the zero-extended density taken directly on the line.
HilbertResult hilbert_halfline_direct(const GridMeasure& mu);

// Double integral of log|x-y| (line) or log|e^{is}-e^{it}| (circle), cell-exact.
double log_energy(const GridMeasure& mu, const GridMeasure& nu);

// Q_mu(x) = 2 int log|x-y| dmu(y), exact for the piecewise-constant density.
class LogPotential {
 public:
  explicit LogPotential(GridMeasure mu);
  double operator()(double x) const;
  double derivative(double x) const;
  // Values at the cell midpoints of the measure's own grid (fast path).
  std::vector<double> at_midpoints() const;
  const GridMeasure& measure() const { return mu_; }

 private:
  GridMeasure mu_;
};

LogPotential log_potential(const GridMeasure& mu);

}  // namespace freeprob
