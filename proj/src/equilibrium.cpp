#include "freeprob/equilibrium.hpp"

#include <algorithm>
#include <numeric>

#include "freeprob/fft.hpp"
#include "freeprob/functionals.hpp"
#include "freeprob/singular.hpp"
#include "freeprob/special.hpp"

namespace freeprob {

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  for (auto& x : v) x = std::max(0.0, x - theta);
}

class EnergyOperator {
 public:
  EnergyOperator(const Domain& d, size_t n) : circle_(d.kind == DomainKind::Circle) {
    double h = d.length() / static_cast<double>(n);
    if (circle_) {
      std::vector<double> k(n);
      for (size_t j = 0; j < n; ++j) {
        double jj = static_cast<double>(j);
        k[j] = logsin_cell_pair(jj * h, (jj + 1.0) * h, 0.0, h) / (h * h);
      }
      circ_ = CirculantOperator(k);
    } else {
      std::vector<double> k(2 * n - 1);
      double lh = std::log(h);
      for (size_t j = 0; j < n; ++j) {
        double v = lh + unit_cell_log_average(static_cast<long>(j));
        k[n - 1 + j] = v;
        k[n - 1 - j] = v;
      }
      toep_ = ToeplitzOperator(k);
    }
  }
  std::vector<double> apply(const std::vector<double>& w) const { return circle_ ? circ_.apply(w) : toep_.apply(w); }

 private:
  bool circle_;
  ToeplitzOperator toep_;
  CirculantOperator circ_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

namespace {

constexpr size_t kHalfLineSkipCells = 16;

// Half-line problems are solved through the symmetrized potential Q~(x) = Q(x^2)/2 on the line:
// mu_Q is the law of x^2 under mu_{Q~}, and B+ = 2 B(Q~).
EquilibriumResult solve_halfline(const PotentialSpec& q, const Domain& window, size_t cells,
                                 const SolverOptions& opt) {
  double s = std::sqrt(window.b);
  PotentialSpec qs = symmetrized_potential(q);
  EquilibriumResult sym = solve_equilibrium(qs, Domain::real_line(-s, s), 2 * cells, opt);
  std::vector<double> m(cells);
  double h = window.b / static_cast<double>(cells);
  for (size_t i = 0; i < cells; ++i) {
    double u = std::sqrt(h * static_cast<double>(i)), v = std::sqrt(h * static_cast<double>(i + 1));
    m[i] = 2.0 * (sym.mu_Q.cdf(v) - sym.mu_Q.cdf(u));
  }
  EquilibriumResult r;
  r.mu_Q = GridMeasure::from_masses(window, m);
  r.B = 2.0 * sym.B;
  r.residual = euler_lagrange_residual(r.mu_Q, q);
  r.iterations = sym.iterations;
  r.converged = sym.converged;
  r.source = "solver";
  return r;
}

}  // namespace

EquilibriumResult solve_equilibrium(const PotentialSpec& q, const Domain& window, size_t cells,
                                    const SolverOptions& opt) {
  if (q.domain == DomainKind::HalfLine) {
    if (window.kind != DomainKind::HalfLine) throw DomainError("solve_equilibrium: half-line potential needs a half-line window");
    return solve_halfline(q, window, cells, opt);
  }
  if ((q.domain == DomainKind::Circle) != (window.kind == DomainKind::Circle))
    throw DomainError("solve_equilibrium: potential and window domains differ");
  size_t n = cells;
  EnergyOperator K(window, n);
  GridMeasure probe = make_uniform(window, n);
  const auto& g3 = gauss_legendre(3);
  double h = probe.width();
  std::vector<double> qv(n);
  for (size_t i = 0; i < n; ++i) {
    double c = probe.midpoint(i), s = 0.0;
    for (size_t k = 0; k < 3; ++k) s += g3.weights[k] * q.Q(c + 0.5 * h * g3.nodes[k]);
    qv[i] = 0.5 * s;
  }

  // Objective -w'Kw + q'w, gradient -2Kw + q.
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  auto Kw = K.apply(w);
  auto grad = [&](const std::vector<double>& kx) {
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i) g[i] = -2.0 * kx[i] + qv[i];
    return g;
  };
  auto g = grad(Kw);
  double alpha = 1.0 / static_cast<double>(n);
  int it = 0;
  bool converged = false;
  double step_norm = 0.0;
  for (; it < opt.max_iterations; ++it) {
    std::vector<double> d(n);
    std::vector<double> trial(n);
    for (size_t i = 0; i < n; ++i) trial[i] = w[i] - g[i];
    project_simplex(trial);
    step_norm = 0.0;
    for (size_t i = 0; i < n; ++i) step_norm = std::max(step_norm, std::abs(trial[i] - w[i]));
    if (step_norm < opt.tolerance) {
      converged = true;
      break;
    }
    for (size_t i = 0; i < n; ++i) trial[i] = w[i] - alpha * g[i];
    project_simplex(trial);
    for (size_t i = 0; i < n; ++i) d[i] = trial[i] - w[i];
    auto Kd = K.apply(d);
    double gd = dot(g, d);
    double dKd = dot(d, Kd);
    // f(w + t d) = f + t gd - t^2 dKd is a convex parabola in t; minimize it on [0, 1].
    double t = 1.0;
    if (dKd < 0) t = std::min(1.0, gd / (2.0 * dKd));
    if (!(t > 0)) t = 1.0;
    std::vector<double> s(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      w[i] += t * d[i];
      Kw[i] += t * Kd[i];
      s[i] = t * d[i];
      y[i] = -2.0 * t * Kd[i];
    }
    for (size_t i = 0; i < n; ++i) g[i] = -2.0 * Kw[i] + qv[i];
    double sy = dot(s, y), ss = dot(s, s);
    alpha = sy > 0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e3 * alpha;
  }
  for (auto& x : w) x = std::max(0.0, x);
  EquilibriumResult r;
  r.mu_Q = GridMeasure::from_masses(window, w);
  r.iterations = it;
  r.converged = converged;
  r.source = "solver";
  r.B = sigma(r.mu_Q) - integrate(r.mu_Q, q.Q);
  r.residual = euler_lagrange_residual(r.mu_Q, q);
  if (!converged && opt.throw_on_failure) {
    throw NumericalError("equilibrium solver did not converge after " + std::to_string(it) +
                         " iterations; step " + std::to_string(step_norm) + ", residual " +
                         std::to_string(r.residual));
  }
  return r;
}

EquilibriumResult solve_equilibrium(const PotentialSpec& q, size_t cells, const SolverOptions& opt) {
  return solve_equilibrium(q, default_window(q), cells, opt);
}

std::optional<EquilibriumResult> closed_form_equilibrium(const PotentialSpec& q, size_t cells) {
  EquilibriumResult r;
  r.source = "closed-form";
  r.converged = true;
  switch (q.tag) {
    case ClosedFormTag::QuadraticR: {
      double rho = q.param;
      r.mu_Q = make_semicircle(2.0 / std::sqrt(rho), cells, default_window(q), q.offset);
      r.B = -0.5 * std::log(rho) - 0.75;
      break;
    }
    case ClosedFormTag::CosineT: {
      if (q.param < 2.0) return std::nullopt;
      r.mu_Q = make_nu_lambda(q.param, cells, q.offset);
      r.B = std::isinf(q.param) ? 0.0 : 1.0 / (q.param * q.param);
      break;
    }
    case ClosedFormTag::LinearHalfLine: {
      double rho = q.param;
      r.mu_Q = make_marchenko_pastur(rho, cells, default_window(q).b);
      r.B = -std::log(rho) - 1.5;
      break;
    }
    default:
      return std::nullopt;
  }
  r.residual = euler_lagrange_residual(r.mu_Q, q);
  return r;
}

double euler_lagrange_residual(const GridMeasure& mu, const PotentialSpec& q) {
  // On the half-line the density may blow up like 1/sqrt(y) at 0, where the piecewise-constant
  // potential is inaccurate; the first cells are skipped.
  size_t skip = q.domain == DomainKind::HalfLine ? kHalfLineSkipCells : 0;
  LogPotential lp(mu);
  auto qm = lp.at_midpoints();
  const auto& p = mu.density();
  double pmax = *std::max_element(p.begin(), p.end());
  std::vector<size_t> idx;
  for (size_t i = skip; i < mu.cells(); ++i)
    if (p[i] > 1e-2 * pmax) idx.push_back(i);
  double c = 0.0, wsum = 0.0;
  std::vector<double> diff(mu.cells());
  for (size_t i : idx) {
    diff[i] = q.Q(mu.midpoint(i)) - qm[i];
    c += mu.mass(i) * diff[i];
    wsum += mu.mass(i);
  }
  c /= wsum;
  double r = 0.0;
  for (size_t i : idx) r = std::max(r, std::abs(diff[i] - c));
  return r;
}

EquilibriumResult equilibrium(const PotentialSpec& q, size_t cells) {
  if (auto r = closed_form_equilibrium(q, cells)) return *r;
  return solve_equilibrium(q, cells);
}

}  // namespace freeprob
