#include "freeprob/singular.hpp"

#include <algorithm>
#include <complex>
#include <tuple>

#include "freeprob/fft.hpp"
#include "freeprob/special.hpp"

namespace freeprob {

namespace {

constexpr int kPad = 8;
constexpr int kCorrectionTerms = 8;

size_t pow2_at_least(size_t n) {
  size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// Cell-exact moments of the density about x0: int (t - x0)^m dmu(t), m = 0..maxm.
std::vector<double> central_moments(const GridMeasure& mu, double x0, int maxm) {
  std::vector<double> out(maxm + 1, 0.0);
  double h = mu.width();
  for (size_t j = 0; j < mu.cells(); ++j) {
    double m = mu.mass(j);
    if (m == 0.0) continue;
    double a = mu.edge(j) - x0, b = a + h;
    double pa = a, pb = b;
    for (int k = 0; k <= maxm; ++k) {
      // (b^{k+1} - a^{k+1}) / ((k+1) h)
      out[k] += m * (pb - pa) / ((k + 1) * h);
      pa *= a;
      pb *= b;
    }
  }
  return out;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<double> samples(const GridMeasure& mu) { return mu.density(); }

}  // namespace

HilbertResult hilbert_R(const GridMeasure& mu) {
  if (mu.domain().kind == DomainKind::Circle) throw DomainError("hilbert_R needs a measure on the line");
  size_t n = mu.cells();
  size_t m = pow2_at_least(kPad * n);
  double h = mu.width();
  double L = h * static_cast<double>(m);
  std::vector<std::complex<double>> x(m, 0.0);
  const auto& p = mu.density();
  for (size_t i = 0; i < n; ++i) x[i] = p[i];
  auto xh = fft_forward(x);
  const std::complex<double> mi(0.0, -kPi);
  for (size_t k = 1; k < m / 2; ++k) {
    xh[k] *= mi;
    xh[m - k] *= -mi;
  }
  xh[0] = 0.0;
  xh[m / 2] = 0.0;
  auto y = fft_inverse(xh);

  // Periodization correction: 1/u - (pi/L) cot(pi u/L) = sum_k 2 zeta(2k) u^{2k-1} / L^{2k}.
  double x0 = 0.5 * (mu.domain().a + mu.domain().b);
  int maxdeg = 2 * kCorrectionTerms - 1;
  auto mom = central_moments(mu, x0, maxdeg);
  std::vector<double> coef(kCorrectionTerms);
  for (int k = 1; k <= kCorrectionTerms; ++k) coef[k - 1] = 2.0 * riemann_zeta_even(2 * k) / std::pow(L, 2 * k);

  HilbertResult r;
  r.convention = HilbertConvention::LineUnnormalized;
  r.points = mu.midpoints();
  r.values.resize(n);
  r.flagged.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    double d = r.points[i] - x0;
    double corr = 0.0;
    for (int k = 1; k <= kCorrectionTerms; ++k) {
      int deg = 2 * k - 1;
      double s = 0.0;
      for (int j = 0; j <= deg; ++j) {
        double term = binom(deg, j) * std::pow(d, deg - j) * mom[j];
        s += (j % 2 == 0) ? term : -term;
      }
      corr += coef[k - 1] * s;
    }
    r.values[i] = y[i].real() + corr;
  }
  return r;
}

HilbertResult hilbert_R_pv(const GridMeasure& mu) {
  if (mu.domain().kind == DomainKind::Circle) throw DomainError("hilbert_R_pv needs a measure on the line");
  auto p = samples(mu);
  long n = static_cast<long>(p.size());
  HilbertResult r;
  r.convention = HilbertConvention::LineUnnormalized;
  r.points = mu.midpoints();
  r.values.assign(n, 0.0);
  r.flagged.assign(n, 0);
  for (long i = 0; i < n; ++i) {
    double s = 0.0;
    long kmax = std::max(i, n - 1 - i);
    for (long k = 1; k <= kmax; k += 2) {
      double left = i - k >= 0 ? p[i - k] : 0.0;
      double right = i + k < n ? p[i + k] : 0.0;
      s += (left - right) / static_cast<double>(k);
    }
    r.values[i] = 2.0 * s;
  }
  return r;
}

HilbertResult hilbert_T(const GridMeasure& mu) {
  if (mu.domain().kind != DomainKind::Circle) throw DomainError("hilbert_T needs a circle measure");
  size_t n = mu.cells();
  const auto& p = mu.density();
  std::vector<std::complex<double>> x(p.begin(), p.end());
  auto xh = fft_forward(x);
  const std::complex<double> mi(0.0, -1.0);
  xh[0] = 0.0;
  for (size_t k = 1; 2 * k < n; ++k) {
    xh[k] *= mi;
    xh[n - k] *= -mi;
  }
  if (n % 2 == 0) xh[n / 2] = 0.0;
  auto y = fft_inverse(xh);
  HilbertResult r;
  r.convention = HilbertConvention::CircleCotangent;
  r.points = mu.midpoints();
  r.values.resize(n);
  r.flagged.assign(n, 0);
  for (size_t i = 0; i < n; ++i) r.values[i] = y[i].real();
  return r;
}

HilbertResult hilbert_T_pv(const GridMeasure& mu) {
  if (mu.domain().kind != DomainKind::Circle) throw DomainError("hilbert_T_pv needs a circle measure");
  long n = static_cast<long>(mu.cells());
  if (n % 2 != 0) throw DomainError("hilbert_T_pv needs an even number of cells");
  const auto& p = mu.density();
  std::vector<double> cot(n, 0.0);
  for (long k = 1; k < n; k += 2) cot[k] = 1.0 / std::tan(kPi * static_cast<double>(k) / static_cast<double>(n));
  HilbertResult r;
  r.convention = HilbertConvention::CircleCotangent;
  r.points = mu.midpoints();
  r.values.assign(n, 0.0);
  r.flagged.assign(n, 0);
  for (long i = 0; i < n; ++i) {
    double s = 0.0;
    for (long k = 1; k < n; k += 2) s += p[((i - k) % n + n) % n] * cot[k];
    r.values[i] = 2.0 * s / static_cast<double>(n);
  }
  return r;
}

HilbertResult hilbert_halfline(const GridMeasure& mu) {
  if (mu.domain().kind != DomainKind::HalfLine && !(mu.domain().on_line() && mu.domain().a == 0.0))
    throw DomainError("hilbert_halfline needs a measure on [0,b]");
  GridMeasure sym = symmetrize_sqrt(mu);
  HilbertResult hs = hilbert_R(sym);
  double hh = sym.width();
  double s0 = sym.domain().a;
  long ns = static_cast<long>(sym.cells());
  auto g = [&](double x) {
    // Cubic Lagrange interpolation through the four nearest midpoints.
    double u = (x - s0) / hh - 0.5;
    long j = static_cast<long>(std::floor(u)) - 1;
    j = std::clamp(j, 0L, ns - 4);
    double s = 0.0;
    for (long a = 0; a < 4; ++a) {
      double w = 1.0;
      for (long b = 0; b < 4; ++b)
        if (b != a) w *= (u - static_cast<double>(j + b)) / static_cast<double>(a - b);
      s += w * hs.values[j + a];
    }
    return s;
  };
  HilbertResult r;
  r.convention = HilbertConvention::LineUnnormalized;
  r.points = mu.midpoints();
  r.values.resize(mu.cells());
  r.flagged.assign(mu.cells(), 0);
  for (size_t i = 0; i < mu.cells(); ++i) {
    double y = r.points[i];
    double x = std::sqrt(y);
    r.values[i] = g(x) / x;
    if (x < hh) r.flagged[i] = 1;
  }
  return r;
}

HilbertResult hilbert_halfline_direct(const GridMeasure& mu) {
  GridMeasure line(Domain::real_line(mu.domain().a, mu.domain().b), mu.density());
  HilbertResult r = hilbert_R(line);
  if (!r.flagged.empty()) r.flagged[0] = 1;
  return r;
}

namespace {

double energy_line_aligned(const GridMeasure& a, const GridMeasure& b) {
  double h = a.width();
  double lo = std::min(a.domain().a, b.domain().a);
  double hi = std::max(a.domain().b, b.domain().b);
  size_t n = static_cast<size_t>(std::llround((hi - lo) / h));
  std::vector<double> ma(n, 0.0), mb(n, 0.0);
  size_t oa = static_cast<size_t>(std::llround((a.domain().a - lo) / h));
  size_t ob = static_cast<size_t>(std::llround((b.domain().a - lo) / h));
  for (size_t i = 0; i < a.cells(); ++i) ma[oa + i] = a.mass(i);
  for (size_t i = 0; i < b.cells(); ++i) mb[ob + i] = b.mass(i);
  double lh = std::log(h);
  std::vector<double> kernel(2 * n - 1);
  for (size_t k = 0; k < n; ++k) {
    double v = lh + unit_cell_log_average(static_cast<long>(k));
    kernel[n - 1 + k] = v;
    kernel[n - 1 - k] = v;
  }
  ToeplitzOperator T(kernel);
  auto y = T.apply(mb);
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += ma[i] * y[i];
  return s;
}

double energy_line_general(const GridMeasure& a, const GridMeasure& b) {
  double ha = a.width(), hb = b.width();
  double s = 0.0;
  for (size_t i = 0; i < a.cells(); ++i) {
    double mi = a.mass(i);
    if (mi == 0.0) continue;
    double a1 = a.edge(i), b1 = a1 + ha;
    double row = 0.0;
    for (size_t j = 0; j < b.cells(); ++j) {
      double mj = b.mass(j);
      if (mj == 0.0) continue;
      double a2 = b.edge(j), b2 = a2 + hb;
      row += mj * log_cell_pair(a1, b1, a2, b2);
    }
    s += mi * row;
  }
  return s / (ha * hb);
}

double energy_circle_same(const GridMeasure& a, const GridMeasure& b) {
  size_t n = a.cells();
  double h = a.width();
  std::vector<double> kernel(n);
  for (size_t k = 0; k < n; ++k) {
    double kk = static_cast<double>(k);
    kernel[k] = logsin_cell_pair(kk * h, (kk + 1.0) * h, 0.0, h) / (h * h);
  }
  CirculantOperator C(kernel);
  auto y = C.apply(b.masses());
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a.mass(i) * y[i];
  return s;
}

double energy_circle_general(const GridMeasure& a, const GridMeasure& b) {
  double ha = a.width(), hb = b.width();
  double s = 0.0;
  for (size_t i = 0; i < a.cells(); ++i) {
    double mi = a.mass(i);
    if (mi == 0.0) continue;
    double a1 = a.edge(i), b1 = a1 + ha;
    double row = 0.0;
    for (size_t j = 0; j < b.cells(); ++j) {
      double a2 = b.edge(j), b2 = a2 + hb;
      row += b.mass(j) * logsin_cell_pair(a1, b1, a2, b2);
    }
    s += mi * row;
  }
  return s / (ha * hb);
}

bool canonical_less(const GridMeasure& a, const GridMeasure& b) {
  auto key = [](const GridMeasure& m) {
    return std::make_tuple(static_cast<int>(m.domain().kind), m.domain().a, m.domain().b, m.cells(), m.digest());
  };
  return key(a) < key(b);
}

}  // namespace

double log_energy(const GridMeasure& mu_in, const GridMeasure& nu_in) {
  if (mu_in.domain().on_line() != nu_in.domain().on_line())
    throw DomainError("log_energy needs both measures on the line or both on the circle");
  // Fixed argument order so that the result is exactly symmetric.
  bool swap = canonical_less(nu_in, mu_in);
  const GridMeasure& mu = swap ? nu_in : mu_in;
  const GridMeasure& nu = swap ? mu_in : nu_in;
  if (!mu.domain().on_line()) {
    if (mu.cells() == nu.cells()) return energy_circle_same(mu, nu);
    return energy_circle_general(mu, nu);
  }
  double ha = mu.width(), hb = nu.width();
  if (std::abs(ha - hb) <= 1e-12 * ha) {
    double off = (nu.domain().a - mu.domain().a) / ha;
    if (std::abs(off - std::round(off)) < 1e-9) return energy_line_aligned(mu, nu);
  }
  return energy_line_general(mu, nu);
}

LogPotential::LogPotential(GridMeasure mu) : mu_(std::move(mu)) {}

LogPotential log_potential(const GridMeasure& mu) { return LogPotential(mu); }

double LogPotential::operator()(double x) const {
  double h = mu_.width();
  double s = 0.0;
  if (mu_.domain().on_line()) {
    for (size_t j = 0; j < mu_.cells(); ++j) {
      double p = mu_.density()[j];
      if (p == 0.0) continue;
      double a = mu_.edge(j);
      s += p * (log_int1(x - a) - log_int1(x - a - h));
    }
    return 2.0 * s;
  }
  for (size_t j = 0; j < mu_.cells(); ++j) {
    double p = mu_.density()[j];
    if (p == 0.0) continue;
    double a = mu_.edge(j);
    s += p * (clausen2(x - a - h) - clausen2(x - a));
  }
  return 2.0 * s / kTwoPi;
}

double LogPotential::derivative(double x) const {
  double h = mu_.width();
  double s = 0.0;
  if (mu_.domain().on_line()) {
    for (size_t j = 0; j < mu_.cells(); ++j) {
      double p = mu_.density()[j];
      if (p == 0.0) continue;
      double a = mu_.edge(j);
      s += p * std::log(std::abs((x - a) / (x - a - h)));
    }
    return 2.0 * s;
  }
  for (size_t j = 0; j < mu_.cells(); ++j) {
    double p = mu_.density()[j];
    if (p == 0.0) continue;
    double a = mu_.edge(j);
    s += p * std::log(std::abs(std::sin(0.5 * (x - a)) / std::sin(0.5 * (x - a - h))));
  }
  return 2.0 * s / kTwoPi;
}

std::vector<double> LogPotential::at_midpoints() const {
  size_t n = mu_.cells();
  double h = mu_.width();
  if (mu_.domain().on_line()) {
    double lh = std::log(h);
    std::vector<double> kernel(2 * n - 1);
    for (size_t k = 0; k < n; ++k) {
      double kk = static_cast<double>(k);
      double v = lh + log_int1(kk + 0.5) - log_int1(kk - 0.5);
      kernel[n - 1 + k] = v;
      kernel[n - 1 - k] = v;
    }
    ToeplitzOperator T(kernel);
    auto y = T.apply(mu_.masses());
    for (auto& v : y) v *= 2.0;
    return y;
  }
  std::vector<double> kernel(n);
  for (size_t k = 0; k < n; ++k) {
    double kk = static_cast<double>(k);
    kernel[k] = (clausen2((kk - 0.5) * h) - clausen2((kk + 0.5) * h)) / h;
  }
  CirculantOperator C(kernel);
  auto y = C.apply(mu_.masses());
  for (auto& v : y) v *= 2.0;
  return y;
}

}  // namespace freeprob
