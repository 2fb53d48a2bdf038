#include "freeprob/transport.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace freeprob {

namespace {

using Piece = QuantileTable::Piece;

double piece_value(const Piece& p, double t) {
  if (p.t1 == p.t0) return p.x0;
  return p.x0 + (t - p.t0) / (p.t1 - p.t0) * (p.x1 - p.x0);
}

// int_0^1 (1/2)(A(t) - B(t))^2 dt for piecewise-linear quantile functions, exactly.
double quantile_cost(const std::vector<Piece>& A, const std::vector<Piece>& B) {
  size_t i = 0, j = 0;
  double t = 0.0, s = 0.0;
  while (i < A.size() && j < B.size()) {
    double t1 = std::min(A[i].t1, B[j].t1);
    if (t1 > t) {
      double d0 = piece_value(A[i], t) - piece_value(B[j], t);
      double d1 = piece_value(A[i], t1) - piece_value(B[j], t1);
      s += (t1 - t) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
      t = t1;
    }
    if (A[i].t1 <= t1) ++i;
    if (j < B.size() && B[j].t1 <= t1) ++j;
  }
  return 0.5 * s;
}

// Pieces of t -> q(t + alpha) on [0, 1], with q extended by q(t + 1) = q(t) + 2 pi.
std::vector<Piece> shifted_pieces(const std::vector<Piece>& P, double alpha) {
  std::vector<Piece> out;
  for (int k = -1; k <= 2; ++k) {
    for (const auto& p : P) {
      double T0 = p.t0 + k - alpha, T1 = p.t1 + k - alpha;
      if (T1 <= 0.0 || T0 >= 1.0) continue;
      double c0 = std::max(T0, 0.0), c1 = std::min(T1, 1.0);
      Piece q{T0, T1, p.x0 + kTwoPi * k, p.x1 + kTwoPi * k};
      double x0 = piece_value(q, c0), x1 = piece_value(q, c1);
      out.push_back({c0, c1, x0, x1});
    }
  }
  if (!out.empty()) {
    out.front().t0 = 0.0;
    out.back().t1 = 1.0;
  }
  return out;
}

double circle_cost(const QuantileTable& a, const QuantileTable& b, double alpha) {
  return quantile_cost(a.pieces, shifted_pieces(b.pieces, alpha));
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double* fmin) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  *fmin = std::min(f1, f2);
  return f1 <= f2 ? x1 : x2;
}

double scan_minimize(const std::function<double(double)>& f, int points) {
  std::vector<double> xs(points + 1), fs(points + 1);
  for (int i = 0; i <= points; ++i) {
    xs[i] = -1.0 + 2.0 * i / points;
    fs[i] = f(xs[i]);
  }
  int best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  double lo = xs[std::max(best - 1, 0)], hi = xs[std::min(best + 1, points)];
  double fm = fs[best];
  double fg;
  golden_min(f, lo, hi, &fg);
  return std::min(fm, fg);
}

bool unimodal(const std::vector<double>& fs) {
  // Values must go down and then up, allowing flat stretches at round-off level.
  double scale = 1e-12 * (1.0 + *std::max_element(fs.begin(), fs.end()));
  size_t i = 1;
  while (i < fs.size() && fs[i] <= fs[i - 1] + scale) ++i;
  while (i < fs.size() && fs[i] >= fs[i - 1] - scale) ++i;
  return i == fs.size();
}

std::vector<std::pair<double, double>> atoms_of(const GridMeasure& mu) {
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i < mu.cells(); ++i)
    if (mu.mass(i) > 0.0) out.push_back({mu.midpoint(i), mu.mass(i)});
  return out;
}

QuantileTable atom_quantile(const std::vector<std::pair<double, double>>& a) {
  std::vector<double> x, w;
  for (auto& [p, m] : a) {
    x.push_back(p);
    w.push_back(m);
  }
  return cdf_quantile_weighted(x, w);
}

double lp_between(const std::vector<std::pair<double, double>>& A, const std::vector<std::pair<double, double>>& B,
                  const std::function<double(double, double)>& cost) {
  std::vector<double> a, b;
  for (auto& p : A) a.push_back(p.second);
  for (auto& p : B) b.push_back(p.second);
  std::vector<std::vector<double>> c(A.size(), std::vector<double>(B.size()));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < B.size(); ++j) c[i][j] = cost(A[i].first, B[j].first);
  return std::sqrt(std::max(0.0, solve_transport_lp(a, b, c).cost));
}

double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace

CouplingPlan solve_transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                                const std::vector<std::vector<double>>& cost) {
  size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw DomainError("transport LP needs nonempty marginals");
  double sa = std::accumulate(supply.begin(), supply.end(), 0.0);
  double sb = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb)) throw DomainError("transport LP marginals have different mass");
  std::vector<double> ra(supply), rb(demand);
  for (auto& x : rb) x *= sa / sb;

  struct Cell {
    size_t i, j;
    double flow;
  };
  std::vector<Cell> basis;
  // Northwest corner start; exactly m + n - 1 basic cells.
  size_t i = 0, j = 0;
  while (true) {
    double f = std::min(ra[i], rb[j]);
    basis.push_back({i, j, f});
    ra[i] -= f;
    rb[j] -= f;
    if (i == m - 1 && j == n - 1) break;
    if (j == n - 1 || (i < m - 1 && ra[i] <= rb[j]))
      ++i;
    else
      ++j;
  }

  double cmax = 0.0;
  for (auto& row : cost)
    for (double x : row) cmax = std::max(cmax, std::abs(x));
  double eps = 1e-13 * std::max(1.0, cmax);

  std::vector<std::vector<size_t>> adj(m + n);
  auto rebuild = [&]() {
    for (auto& a : adj) a.clear();
    for (size_t k = 0; k < basis.size(); ++k) {
      adj[basis[k].i].push_back(k);
      adj[m + basis[k].j].push_back(k);
    }
  };
  std::vector<double> u(m), v(n);
  std::vector<char> known(m + n);
  size_t max_iter = 50 * (m + n) * (m + n) + 1000;
  for (size_t iter = 0;; ++iter) {
    if (iter > max_iter) throw NumericalError("transport LP did not converge");
    rebuild();
    std::fill(known.begin(), known.end(), 0);
    std::queue<size_t> qu;
    u[0] = 0.0;
    known[0] = 1;
    qu.push(0);
    while (!qu.empty()) {
      size_t node = qu.front();
      qu.pop();
      for (size_t k : adj[node]) {
        const Cell& c = basis[k];
        size_t other = node < m ? m + c.j : c.i;
        if (known[other]) continue;
        if (node < m)
          v[c.j] = cost[c.i][c.j] - u[c.i];
        else
          u[c.i] = cost[c.i][c.j] - v[c.j];
        known[other] = 1;
        qu.push(other);
      }
    }
    double best = -eps;
    size_t bi = m, bj = n;
    for (size_t r = 0; r < m; ++r) {
      const auto& crow = cost[r];
      double ur = u[r];
      for (size_t s = 0; s < n; ++s) {
        double rc = crow[s] - ur - v[s];
        if (rc < best) {
          best = rc;
          bi = r;
          bj = s;
        }
      }
    }
    if (bi == m) break;
    // Tree path from column bj to row bi.
    std::vector<long> parent_cell(m + n, -1);
    std::vector<char> seen(m + n, 0);
    std::queue<size_t> q2;
    q2.push(m + bj);
    seen[m + bj] = 1;
    while (!q2.empty() && !seen[bi]) {
      size_t node = q2.front();
      q2.pop();
      for (size_t k : adj[node]) {
        const Cell& c = basis[k];
        size_t other = node < m ? m + c.j : c.i;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_cell[other] = static_cast<long>(k);
        q2.push(other);
      }
    }
    std::vector<size_t> path;  // cells from row bi back to column bj
    size_t node = bi;
    while (node != m + bj) {
      size_t k = static_cast<size_t>(parent_cell[node]);
      path.push_back(k);
      const Cell& c = basis[k];
      node = node < m ? m + c.j : c.i;
    }
    // Walking from column bj to row bi the signs alternate -, +, -, ...
    std::reverse(path.begin(), path.end());
    double theta = std::numeric_limits<double>::infinity();
    size_t leave = 0;
    for (size_t p = 0; p < path.size(); p += 2) {
      if (basis[path[p]].flow < theta) {
        theta = basis[path[p]].flow;
        leave = path[p];
      }
    }
    for (size_t p = 0; p < path.size(); ++p) basis[path[p]].flow += (p % 2 == 0) ? -theta : theta;
    basis[leave] = {bi, bj, theta};
  }
  CouplingPlan plan;
  for (auto& c : basis) {
    double f = std::max(0.0, c.flow);
    if (f > 0.0) plan.entries.emplace_back(c.i, c.j, f);
    plan.cost += f * cost[c.i][c.j];
  }
  return plan;
}

double wasserstein_R(const QuantileTable& a, const QuantileTable& b) {
  return std::sqrt(std::max(0.0, quantile_cost(a.pieces, b.pieces)));
}

double wasserstein_R(const GridMeasure& mu, const GridMeasure& nu) {
  if (!mu.domain().on_line() || !nu.domain().on_line()) throw DomainError("wasserstein_R needs line measures");
  return wasserstein_R(cdf_quantile(mu), cdf_quantile(nu));
}

double wasserstein_R(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return wasserstein_R(cdf_quantile(mu), cdf_quantile(nu));
}

double wasserstein_R(const GridMeasure& mu, const EmpiricalMeasure& nu) {
  return wasserstein_R(cdf_quantile(mu), cdf_quantile(nu));
}

double wasserstein_R(const EmpiricalMeasure& mu, const GridMeasure& nu) { return wasserstein_R(nu, mu); }

double wasserstein_R_atoms(const GridMeasure& mu, const GridMeasure& nu) {
  return wasserstein_R(atom_quantile(atoms_of(mu)), atom_quantile(atoms_of(nu)));
}

double wasserstein_R_lp(const GridMeasure& mu, const GridMeasure& nu) {
  return lp_between(atoms_of(mu), atoms_of(nu), [](double x, double y) { return 0.5 * (x - y) * (x - y); });
}

double wasserstein_T_geodesic(const QuantileTable& a, const QuantileTable& b) {
  auto f = [&](double alpha) { return circle_cost(a, b, alpha); };
  const int coarse = 64;
  std::vector<double> fs(coarse + 1);
  for (int i = 0; i <= coarse; ++i) fs[i] = f(-1.0 + 2.0 * i / coarse);
  double best;
  if (unimodal(fs)) {
    int k = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    double lo = -1.0 + 2.0 * std::max(k - 1, 0) / coarse, hi = -1.0 + 2.0 * std::min(k + 1, coarse) / coarse;
    golden_min(f, lo, hi, &best);
    best = std::min(best, fs[k]);
  } else {
    best = scan_minimize(f, 4096);
  }
  return std::sqrt(std::max(0.0, best));
}

double wasserstein_T_geodesic(const GridMeasure& mu, const GridMeasure& nu) {
  if (mu.domain().kind != DomainKind::Circle || nu.domain().kind != DomainKind::Circle)
    throw DomainError("wasserstein_T needs circle measures");
  return wasserstein_T_geodesic(cdf_quantile(mu), cdf_quantile(nu));
}

double wasserstein_T_geodesic(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return wasserstein_T_geodesic(cdf_quantile(mu), cdf_quantile(nu));
}

double wasserstein_T_geodesic_atoms(const GridMeasure& mu, const GridMeasure& nu) {
  return wasserstein_T_geodesic(atom_quantile(atoms_of(mu)), atom_quantile(atoms_of(nu)));
}

double wasserstein_T_geodesic_lp(const GridMeasure& mu, const GridMeasure& nu) {
  if (mu.cells() > 512 || nu.cells() > 512) throw Unsupported("LP oracle limited to 512 cells");
  return lp_between(atoms_of(mu), atoms_of(nu), [](double s, double t) {
    double d = angular_distance(s, t);
    return 0.5 * d * d;
  });
}

double wasserstein_T_chord(const GridMeasure& mu, const GridMeasure& nu) {
  if (mu.domain().kind != DomainKind::Circle || nu.domain().kind != DomainKind::Circle)
    throw DomainError("wasserstein_T_chord needs circle measures");
  if (mu.cells() > 512 || nu.cells() > 512) throw Unsupported("chord distance limited to 512 cells");
  return lp_between(atoms_of(mu), atoms_of(nu), [](double s, double t) { return 1.0 - std::cos(s - t); });
}

double optimal_matching_distance_brute(const std::vector<double>& zeta, const std::vector<double>& eta) {
  size_t n = zeta.size();
  if (eta.size() != n) throw DomainError("matching needs equal counts");
  if (n > 10) throw Unsupported("brute-force matching limited to n <= 10");
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = angular_distance(zeta[i], eta[perm[i]]);
      s += d * d;
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best);
}

double optimal_matching_distance(const std::vector<double>& zeta_in, const std::vector<double>& eta_in) {
  size_t n = zeta_in.size();
  if (eta_in.size() != n) throw DomainError("matching needs equal counts");
  if (n == 0) return 0.0;
  std::vector<double> z(n), e(n);
  for (size_t i = 0; i < n; ++i) {
    z[i] = wrap_angle(zeta_in[i]);
    e[i] = wrap_angle(eta_in[i]);
  }
  std::sort(z.begin(), z.end());
  std::sort(e.begin(), e.end());
  double best = std::numeric_limits<double>::infinity();
  for (size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = angular_distance(z[i], e[(i + s) % n]);
      acc += d * d;
    }
    best = std::min(best, acc);
  }
  double fast = std::sqrt(best);
#ifdef FREEPROB_SHADOW_CHECKS
  if (n <= 8) {
    double brute = optimal_matching_distance_brute(zeta_in, eta_in);
    if (std::abs(brute - fast) > 1e-9 * (1.0 + brute))
      throw NumericalError("cyclic-shift matching disagrees with brute force");
  }
#endif
  return fast;
}

SlackReport check_matrix_contraction(const MatrixMeasure& mu, const MatrixMeasure& nu) {
  if (mu.atoms.empty() || nu.atoms.empty()) throw DomainError("matrix measures must be nonempty");
  long n = mu.atoms.front().rows();
  std::vector<std::vector<double>> c(mu.atoms.size(), std::vector<double>(nu.atoms.size()));
  for (size_t i = 0; i < mu.atoms.size(); ++i)
    for (size_t j = 0; j < nu.atoms.size(); ++j) c[i][j] = 0.5 * (mu.atoms[i] - nu.atoms[j]).squaredNorm();
  double wt = std::sqrt(std::max(0.0, solve_transport_lp(mu.weights, nu.weights, c).cost));
  auto spectral = [n](const MatrixMeasure& m) {
    std::vector<double> x, w;
    for (size_t k = 0; k < m.atoms.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<CMat> es(m.atoms[k]);
      for (long i = 0; i < n; ++i) {
        x.push_back(es.eigenvalues()[i]);
        w.push_back(m.weights[k] / static_cast<double>(n));
      }
    }
    return cdf_quantile_weighted(x, w);
  };
  double wh = wasserstein_R(spectral(mu), spectral(nu));
  SlackReport r;
  r.lhs = wh;
  r.rhs = wt / std::sqrt(static_cast<double>(n));
  r.slack = r.rhs - r.lhs;
  return r;
}

SlackReport check_su_matching_bound(const CMat& U, const CMat& V) {
  SlackReport r;
  try {
    r.rhs = geodesic_distance_su(U, V);
  } catch (const NumericalError&) {
    r.skipped = true;
    return r;
  }
  auto a = eigenangles(U), b = eigenangles(V);
  std::vector<double> za(a.data(), a.data() + a.size()), zb(b.data(), b.data() + b.size());
  r.lhs = optimal_matching_distance(za, zb);
  r.slack = r.rhs - r.lhs;
  return r;
}

}  // namespace freeprob
