#include "freeprob/functionals.hpp"

#include "freeprob/singular.hpp"
#include "freeprob/special.hpp"

namespace freeprob {

namespace {

struct Nodes {
  std::vector<double> x, w;
};

// Two Gauss-Legendre nodes per nonempty cell, weighted by cell mass.
Nodes mass_nodes(const GridMeasure& mu, std::vector<size_t>* cell_of = nullptr) {
  const auto& g = gauss_legendre(2);
  Nodes n;
  double h = mu.width();
  for (size_t i = 0; i < mu.cells(); ++i) {
    double m = mu.mass(i);
    if (m == 0.0) continue;
    for (int k = 0; k < 2; ++k) {
      n.x.push_back(mu.midpoint(i) + 0.5 * h * g.nodes[k]);
      n.w.push_back(0.5 * m * g.weights[k]);
      if (cell_of) cell_of->push_back(i);
    }
  }
  return n;
}

// int (Hp) g dmu = (1/2) int int (g(x)-g(t))/(x-t) dmu dmu on the line.
double hilbert_pairing_line(const GridMeasure& mu, const PotentialSpec& q) {
  if (q.tag == ClosedFormTag::QuadraticR) return 0.5 * q.param;
  Nodes n = mass_nodes(mu);
  size_t m = n.x.size();
  std::vector<double> g(m), d(m);
  for (size_t a = 0; a < m; ++a) {
    g[a] = q.Qprime(n.x[a]);
    d[a] = q.second(n.x[a]);
  }
  double s = 0.0;
  for (size_t a = 0; a < m; ++a) {
    double row = n.w[a] * d[a];
    for (size_t b = a + 1; b < m; ++b) row += 2.0 * n.w[b] * (g[a] - g[b]) / (n.x[a] - n.x[b]);
    s += n.w[a] * row;
  }
  return 0.5 * s;
}

// int (Hp) g dmu = (1/2) int int (g(s)-g(t)) cot((s-t)/2) dmu dmu on the circle.
double hilbert_pairing_circle(const GridMeasure& mu, const PotentialSpec& q) {
  if (q.tag == ClosedFormTag::CosineT) {
    if (std::isinf(q.param)) return 0.0;
    double c = 2.0 / q.param, ph = q.offset;
    return c * integrate(mu, [ph](double t) { return std::cos(t - ph); });
  }
  std::vector<size_t> cell;
  Nodes n = mass_nodes(mu, &cell);
  size_t m = n.x.size();
  size_t N = mu.cells();
  double h = mu.width();
  const auto& gl = gauss_legendre(2);
  // cot table indexed by cell offset and node pair
  std::vector<double> cot(4 * N);
  for (size_t k = 0; k < N; ++k)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double off = static_cast<double>(k) * h + 0.5 * h * (gl.nodes[a] - gl.nodes[b]);
        cot[4 * k + 2 * a + b] = (k == 0 && a == b) ? 0.0 : 1.0 / std::tan(0.5 * off);
      }
  std::vector<double> g(m), d(m);
  std::vector<int> side(m);
  for (size_t a = 0; a < m; ++a) {
    g[a] = q.Qprime(n.x[a]);
    d[a] = q.second(n.x[a]);
    side[a] = static_cast<int>(a % 2);
  }
  double s = 0.0;
  for (size_t a = 0; a < m; ++a) {
    double row = n.w[a] * 2.0 * d[a];
    for (size_t b = a + 1; b < m; ++b) {
      size_t k = (cell[a] + N - cell[b]) % N;
      row += 2.0 * n.w[b] * (g[a] - g[b]) * cot[4 * k + 2 * side[a] + side[b]];
    }
    s += n.w[a] * row;
  }
  return 0.5 * s;
}

double sum_p3(const GridMeasure& mu) {
  double s = 0.0;
  for (double p : mu.density()) s += p * p * p;
  return s;
}

void require_line(const GridMeasure& mu, const char* what) {
  if (!mu.domain().on_line()) throw DomainError(std::string(what) + " needs a measure on the line");
}

void require_circle(const GridMeasure& mu, const char* what) {
  if (mu.domain().kind != DomainKind::Circle) throw DomainError(std::string(what) + " needs a circle measure");
}

void require_match(const GridMeasure& mu, const PotentialSpec& q) {
  bool ok = (q.domain == DomainKind::Circle) == (mu.domain().kind == DomainKind::Circle);
  if (!ok) throw DomainError("potential domain does not match the measure domain");
}

}  // namespace

double integrate(const GridMeasure& mu, const std::function<double(double)>& f, int nodes_per_cell) {
  const auto& g = gauss_legendre(nodes_per_cell);
  double h = mu.width();
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) {
    double m = mu.mass(i);
    if (m == 0.0) continue;
    double c = mu.midpoint(i), acc = 0.0;
    for (size_t k = 0; k < g.nodes.size(); ++k) acc += g.weights[k] * f(c + 0.5 * h * g.nodes[k]);
    s += 0.5 * m * acc;
  }
  return s;
}

double sigma(const GridMeasure& mu) { return log_energy(mu, mu); }

double chi(const GridMeasure& mu) {
  require_line(mu, "chi");
  return sigma(mu) + 0.75 + 0.5 * std::log(kTwoPi);
}

double weighted_energy(const GridMeasure& mu, const PotentialSpec& q) {
  require_match(mu, q);
  return -sigma(mu) + integrate(mu, q.Q);
}

double relative_free_entropy(const GridMeasure& mu, const PotentialSpec& q, double B) {
  return weighted_energy(mu, q) + B;
}

Extended fisher_R(const GridMeasure& mu) {
  require_line(mu, "fisher_R");
  return Extended::finite(4.0 * kPi * kPi / 3.0 * sum_p3(mu) * mu.width());
}

double fisher_R_hilbert(const GridMeasure& mu) {
  auto H = hilbert_R(mu);
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) s += mu.mass(i) * H.values[i] * H.values[i];
  return 4.0 * s;
}

Extended fisher_rel_R(const GridMeasure& mu, const PotentialSpec& q) {
  require_line(mu, "fisher_rel_R");
  require_match(mu, q);
  double phi = fisher_R(mu).get();
  double pair = hilbert_pairing_line(mu, q);
  double q2 = integrate(mu, [&q](double x) {
    double d = q.Qprime(x);
    return d * d;
  });
  return Extended::finite(phi - 4.0 * pair + q2);
}

double fisher_rel_R_hilbert(const GridMeasure& mu, const PotentialSpec& q) {
  auto H = hilbert_R(mu);
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) {
    double d = H.values[i] - 0.5 * q.Qprime(H.points[i]);
    s += mu.mass(i) * d * d;
  }
  return 4.0 * s;
}

Extended fisher_T(const GridMeasure& mu) {
  require_circle(mu, "fisher_T");
  return Extended::finite((-1.0 + sum_p3(mu) / static_cast<double>(mu.cells())) / 3.0);
}

double fisher_T_hilbert(const GridMeasure& mu) {
  auto H = hilbert_T(mu);
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) s += mu.mass(i) * H.values[i] * H.values[i];
  return s;
}

Extended fisher_rel_T(const GridMeasure& mu, const PotentialSpec& q) {
  require_circle(mu, "fisher_rel_T");
  require_match(mu, q);
  double F = fisher_T(mu).get();
  double pair = hilbert_pairing_circle(mu, q);
  double q1 = integrate(mu, q.Qprime);
  double q2 = integrate(mu, [&q](double t) {
    double d = q.Qprime(t);
    return d * d;
  });
  return Extended::finite(F - 2.0 * pair + q2 - q1 * q1);
}

double fisher_rel_T_hilbert(const GridMeasure& mu, const PotentialSpec& q) {
  auto H = hilbert_T(mu);
  double s = 0.0, s1 = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) {
    double g = q.Qprime(H.points[i]);
    double d = H.values[i] - g;
    s += mu.mass(i) * d * d;
    s1 += mu.mass(i) * g;
  }
  return s - s1 * s1;
}

Extended fisher_halfline(const GridMeasure& mu) { return fisher_R(symmetrize_sqrt(mu)); }

Extended fisher_rel_halfline(const GridMeasure& mu, const PotentialSpec& q) {
  if (q.domain != DomainKind::HalfLine) throw DomainError("fisher_rel_halfline needs a half-line potential");
  return fisher_rel_R(symmetrize_sqrt(mu), symmetrized_potential(q));
}

double fisher_rel_halfline_hilbert(const GridMeasure& mu, const PotentialSpec& q) {
  auto H = hilbert_halfline(mu);
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) {
    double y = H.points[i];
    double d = H.values[i] - 0.5 * q.Qprime(y);
    s += mu.mass(i) * y * d * d;
  }
  return 4.0 * s;
}

double fisher_halfline_hilbert(const GridMeasure& mu) {
  auto H = hilbert_halfline(mu);
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) s += mu.mass(i) * H.points[i] * H.values[i] * H.values[i];
  return 4.0 * s;
}

double relative_free_entropy_halfline(const GridMeasure& mu, const PotentialSpec& q, double Bplus) {
  return -sigma(mu) + integrate(mu, q.Q) + Bplus;
}

Extended relative_entropy(const GridMeasure& mu, const GridMeasure& nu_in) {
  if (mu.domain().on_line() != nu_in.domain().on_line()) throw DomainError("relative_entropy: domain mismatch");
  GridMeasure nu = (nu_in.domain() == mu.domain() && nu_in.cells() == mu.cells())
                       ? nu_in
                       : regrid(nu_in, mu.domain(), mu.cells());
  double s = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) {
    double p = mu.density()[i];
    if (p == 0.0) continue;
    double r = nu.density()[i];
    if (r == 0.0) return Extended::plus_infinity();
    s += mu.mass(i) * std::log(p / r);
  }
  return Extended::finite(s);
}

double free_relative_entropy_two_measure(const GridMeasure& mu, const GridMeasure& nu) {
  double v = -(log_energy(mu, mu) - 2.0 * log_energy(mu, nu) + log_energy(nu, nu));
  return v;
}

FunctionalValue evaluate_functional(const std::string& name, const GridMeasure& mu, const PotentialSpec* q,
                                    double B) {
  auto need_q = [&]() -> const PotentialSpec& {
    if (!q) throw DomainError("functional '" + name + "' needs a potential");
    return *q;
  };
  FunctionalValue v;
  v.name = name;
  v.digest = mu.digest();
  bool circle = mu.domain().kind == DomainKind::Circle;
  if (name == "sigma") {
    v.value = Extended::finite(sigma(mu));
  } else if (name == "chi") {
    v.value = Extended::finite(chi(mu));
  } else if (name == "energy") {
    v.value = Extended::finite(weighted_energy(mu, need_q()));
  } else if (name == "sigma-tilde") {
    v.value = Extended::finite(relative_free_entropy(mu, need_q(), B));
  } else if (name == "phi") {
    v.value = fisher_R(mu);
  } else if (name == "phi-q") {
    v.value = fisher_rel_R(mu, need_q());
  } else if (name == "F") {
    v.value = fisher_T(mu);
  } else if (name == "F-q") {
    v.value = fisher_rel_T(mu, need_q());
  } else if (name == "fisher") {
    v.value = circle ? fisher_T(mu) : fisher_R(mu);
  } else if (name == "phi-plus") {
    v.value = fisher_halfline(mu);
  } else if (name == "phi-plus-q") {
    v.value = fisher_rel_halfline(mu, need_q());
  } else if (name == "sigma-tilde-plus") {
    v.value = Extended::finite(relative_free_entropy_halfline(mu, need_q(), B));
  } else {
    throw DomainError("unknown functional: " + name);
  }
  return v;
}

}  // namespace freeprob
