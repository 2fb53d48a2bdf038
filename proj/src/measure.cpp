#include "freeprob/measure.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "freeprob/special.hpp"

namespace freeprob {

Domain Domain::real_line(double a, double b) {
  if (!(b > a)) throw DomainError("real-line domain needs a < b");
  return {DomainKind::RealLine, a, b};
}

Domain Domain::circle() { return {DomainKind::Circle, -kPi, kPi}; }

Domain Domain::half_line(double b) {
  if (!(b > 0)) throw DomainError("half-line domain needs b > 0");
  return {DomainKind::HalfLine, 0.0, b};
}

std::string domain_name(DomainKind k) {
  switch (k) {
    case DomainKind::RealLine: return "real";
    case DomainKind::Circle: return "circle";
    case DomainKind::HalfLine: return "halfline";
  }
  return "real";
}

DomainKind parse_domain_name(const std::string& s) {
  if (s == "real") return DomainKind::RealLine;
  if (s == "circle") return DomainKind::Circle;
  if (s == "halfline") return DomainKind::HalfLine;
  throw DomainError("unknown domain tag: " + s);
}

GridMeasure::GridMeasure(Domain domain, std::vector<double> density)
    : domain_(domain), density_(std::move(density)) {
  if (density_.size() < 8) throw DomainError("grid measure needs at least 8 cells");
  if (domain_.kind == DomainKind::Circle && (domain_.a != -kPi || domain_.b != kPi))
    throw DomainError("circle grid must cover [-pi, pi)");
  if (domain_.kind == DomainKind::HalfLine && domain_.a != 0.0)
    throw DomainError("half-line grid must start at 0");
  double total = 0.0;
  for (double d : density_) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("density must be finite and nonnegative");
    total += d;
  }
  if (!(total > 0.0)) throw DomainError("density has zero mass");
  double scale = 1.0 / (total * width() * domain_.density_scale());
  for (double& d : density_) d *= scale;
  cumulative_.assign(density_.size() + 1, 0.0);
  for (size_t i = 0; i < density_.size(); ++i) cumulative_[i + 1] = cumulative_[i] + mass(i);
}

GridMeasure GridMeasure::from_masses(Domain domain, const std::vector<double>& masses) {
  double h = domain.length() / static_cast<double>(masses.size());
  std::vector<double> d(masses.size());
  for (size_t i = 0; i < masses.size(); ++i) d[i] = std::max(0.0, masses[i]) / (h * domain.density_scale());
  return GridMeasure(domain, std::move(d));
}

GridMeasure GridMeasure::from_cdf(Domain domain, size_t cells, const std::function<double(double)>& cdf) {
  std::vector<double> m(cells);
  double h = domain.length() / static_cast<double>(cells);
  double prev = cdf(domain.a);
  for (size_t i = 0; i < cells; ++i) {
    double next = cdf(domain.a + h * static_cast<double>(i + 1));
    m[i] = std::max(0.0, next - prev);
    prev = next;
  }
  return from_masses(domain, m);
}

GridMeasure GridMeasure::from_density(Domain domain, size_t cells, const std::function<double(double)>& p,
                                      int nodes_per_cell) {
  const auto& g = gauss_legendre(nodes_per_cell);
  double h = domain.length() / static_cast<double>(cells);
  std::vector<double> d(cells);
  for (size_t i = 0; i < cells; ++i) {
    double c = domain.a + h * (static_cast<double>(i) + 0.5);
    double s = 0.0;
    for (size_t k = 0; k < g.nodes.size(); ++k) s += 0.5 * g.weights[k] * p(c + 0.5 * h * g.nodes[k]);
    d[i] = std::max(0.0, s);
  }
  return GridMeasure(domain, std::move(d));
}

double GridMeasure::density_at(double x) const {
  if (domain_.kind == DomainKind::Circle) x = wrap_angle(x);
  if (x < domain_.a || x >= domain_.b) return 0.0;
  size_t i = std::min(cells() - 1, static_cast<size_t>((x - domain_.a) / width()));
  return density_[i];
}

std::vector<double> GridMeasure::masses() const {
  std::vector<double> m(cells());
  for (size_t i = 0; i < cells(); ++i) m[i] = mass(i);
  return m;
}

std::vector<double> GridMeasure::midpoints() const {
  std::vector<double> m(cells());
  for (size_t i = 0; i < cells(); ++i) m[i] = midpoint(i);
  return m;
}

double GridMeasure::cdf(double x) const {
  if (x <= domain_.a) return 0.0;
  if (x >= domain_.b) return 1.0;
  double s = (x - domain_.a) / width();
  size_t i = std::min(cells() - 1, static_cast<size_t>(s));
  double frac = s - static_cast<double>(i);
  return cumulative_[i] + frac * mass(i);
}

double GridMeasure::moment(int k) const {
  double h = width();
  double s = 0.0;
  for (size_t i = 0; i < cells(); ++i) {
    if (density_[i] == 0.0) continue;
    double a = edge(i), b = a + h;
    double cell = (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * h);
    s += mass(i) * cell;
  }
  return s;
}

double GridMeasure::total_mass() const { return cumulative_.back(); }

std::pair<double, double> GridMeasure::support() const {
  size_t lo = 0, hi = cells();
  while (lo < hi && density_[lo] == 0.0) ++lo;
  while (hi > lo && density_[hi - 1] == 0.0) --hi;
  return {edge(lo), edge(hi)};
}

std::string GridMeasure::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ULL;
    }
  };
  int k = static_cast<int>(domain_.kind);
  mix(&k, sizeof k);
  mix(&domain_.a, sizeof(double));
  mix(&domain_.b, sizeof(double));
  mix(density_.data(), density_.size() * sizeof(double));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EmpiricalMeasure::EmpiricalMeasure(Domain d, std::vector<double> a) : domain(d), atoms(std::move(a)) {
  if (domain.kind == DomainKind::Circle)
    for (double& x : atoms) x = wrap_angle(x);
  std::sort(atoms.begin(), atoms.end());
}

double EmpiricalMeasure::moment(int k) const {
  double s = 0.0;
  for (double x : atoms) s += std::pow(x, k);
  return s / static_cast<double>(atoms.size());
}

double QuantileTable::quantile(double t) const {
  if (pieces.empty()) throw DomainError("empty quantile table");
  t = std::clamp(t, 0.0, 1.0);
  auto it = std::lower_bound(pieces.begin(), pieces.end(), t,
                             [](const Piece& p, double v) { return p.t1 < v; });
  if (it == pieces.end()) it = pieces.end() - 1;
  if (it->t1 == it->t0) return it->x0;
  double f = (t - it->t0) / (it->t1 - it->t0);
  return it->x0 + f * (it->x1 - it->x0);
}

double QuantileTable::cdf(double x) const {
  if (pieces.empty()) throw DomainError("empty quantile table");
  if (x < pieces.front().x0) return 0.0;
  for (const auto& p : pieces) {
    if (x <= p.x1) {
      if (p.x1 == p.x0) return p.t1;
      if (x < p.x0) return p.t0;
      return p.t0 + (x - p.x0) / (p.x1 - p.x0) * (p.t1 - p.t0);
    }
  }
  return 1.0;
}

QuantileTable cdf_quantile(const GridMeasure& mu) {
  QuantileTable q;
  double t = 0.0;
  for (size_t i = 0; i < mu.cells(); ++i) {
    double m = mu.mass(i);
    if (m <= 0.0) continue;
    double t1 = (i + 1 == mu.cells()) ? 1.0 : std::min(1.0, t + m);
    q.pieces.push_back({t, t1, mu.edge(i), mu.edge(i) + mu.width()});
    t = t1;
  }
  if (!q.pieces.empty()) q.pieces.back().t1 = 1.0;
  return q;
}

QuantileTable cdf_quantile_weighted(std::vector<double> atoms, std::vector<double> weights) {
  std::vector<size_t> idx(atoms.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return atoms[i] < atoms[j]; });
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  QuantileTable q;
  double t = 0.0;
  for (size_t k = 0; k < idx.size(); ++k) {
    double w = weights[idx[k]] / total;
    if (w <= 0.0) continue;
    double t1 = std::min(1.0, t + w);
    q.pieces.push_back({t, t1, atoms[idx[k]], atoms[idx[k]]});
    t = t1;
  }
  if (!q.pieces.empty()) q.pieces.back().t1 = 1.0;
  return q;
}

QuantileTable cdf_quantile(const EmpiricalMeasure& mu) {
  std::vector<double> w(mu.atoms.size(), 1.0);
  return cdf_quantile_weighted(mu.atoms, w);
}

GridMeasure make_semicircle(double r, size_t cells) {
  if (!(r > 0)) throw DomainError("semicircle radius must be positive");
  return make_semicircle(r, cells, Domain::real_line(-r, r));
}

GridMeasure make_semicircle(double r, size_t cells, Domain domain, double center) {
  if (!(r > 0)) throw DomainError("semicircle radius must be positive");
  auto cdf = [r, center](double x) {
    double u = std::clamp((x - center) / r, -1.0, 1.0);
    return 0.5 + (u * std::sqrt(1.0 - u * u) + std::asin(u)) / kPi;
  };
  return GridMeasure::from_cdf(domain, cells, cdf);
}

GridMeasure make_nu_lambda(double lambda, size_t cells, double phase) {
  if (std::isinf(lambda)) return make_uniform(Domain::circle(), cells);
  if (!(lambda >= 2.0)) throw DomainError("nu_lambda needs lambda >= 2 (density would be negative)");
  double c = 2.0 / lambda;
  auto cdf = [c, phase](double t) { return (t + kPi + c * (std::sin(t - phase) - std::sin(-kPi - phase))) / kTwoPi; };
  return GridMeasure::from_cdf(Domain::circle(), cells, cdf);
}

GridMeasure make_power_density(double alpha, size_t cells) {
  if (!(alpha > -1.0)) throw DomainError("power density needs alpha > -1 (non-integrable)");
  auto cdf = [alpha](double x) { return x <= 0 ? 0.0 : std::pow(std::min(x, 1.0), alpha + 1.0); };
  return GridMeasure::from_cdf(Domain::half_line(1.0), cells, cdf);
}

GridMeasure make_uniform(Domain domain, size_t cells) {
  return GridMeasure(domain, std::vector<double>(cells, 1.0));
}

GridMeasure make_quarter_circle(double r, size_t cells, double b) {
  if (!(r > 0)) throw DomainError("quarter circle radius must be positive");
  if (b <= 0) b = r;
  auto cdf = [r](double x) {
    double u = std::clamp(x / r, 0.0, 1.0);
    return 2.0 * (u * std::sqrt(1.0 - u * u) + std::asin(u)) / kPi;
  };
  return GridMeasure::from_cdf(Domain::half_line(b), cells, cdf);
}

GridMeasure make_marchenko_pastur(double rho, size_t cells, double b) {
  if (!(rho > 0)) throw DomainError("rho must be positive");
  double r = 2.0 / std::sqrt(rho);
  if (b <= 0) b = r * r;
  auto cdf = [r](double y) {
    double u = std::clamp(std::sqrt(std::max(y, 0.0)) / r, 0.0, 1.0);
    return 2.0 * (u * std::sqrt(1.0 - u * u) + std::asin(u)) / kPi;
  };
  return GridMeasure::from_cdf(Domain::half_line(b), cells, cdf);
}

GridMeasure make_spike_measure(int k, int n, size_t cells_per_arc) {
  if (k < 1 || n < 1) throw DomainError("spike measure needs k, n >= 1");
  if (cells_per_arc % 2 == 1) ++cells_per_arc;
  size_t cells = static_cast<size_t>(k) * static_cast<size_t>(n) * cells_per_arc;
  std::vector<double> d(cells, 0.0);
  for (int j = 0; j < k; ++j) {
    // center at -pi + (2j+1) pi / k; first cell index of the arc
    size_t start = static_cast<size_t>(j) * n * cells_per_arc + (static_cast<size_t>(n) - 1) * cells_per_arc / 2;
    for (size_t c = 0; c < cells_per_arc; ++c) d[start + c] = static_cast<double>(n);
  }
  return GridMeasure(Domain::circle(), std::move(d));
}

GridMeasure symmetrize_sqrt(const GridMeasure& mu, size_t cells) {
  if (!mu.domain().on_line() || mu.domain().a < 0.0) throw DomainError("symmetrize_sqrt needs a measure on [0,b]");
  if (cells == 0) cells = 2 * mu.cells();
  double s = std::sqrt(mu.domain().b);
  Domain out = Domain::real_line(-s, s);
  double h = 2.0 * s / static_cast<double>(cells);
  std::vector<double> m(cells);
  for (size_t i = 0; i < cells; ++i) {
    double u = -s + h * static_cast<double>(i), v = u + h;
    if (u >= 0) {
      m[i] = 0.5 * (mu.cdf(v * v) - mu.cdf(u * u));
    } else if (v <= 0) {
      m[i] = 0.5 * (mu.cdf(u * u) - mu.cdf(v * v));
    } else {
      m[i] = 0.5 * (mu.cdf(u * u) + mu.cdf(v * v));
    }
  }
  return GridMeasure::from_masses(out, m);
}

GridMeasure pushforward_sqrt(const GridMeasure& mu, size_t cells) {
  if (!mu.domain().on_line() || mu.domain().a < 0.0) throw DomainError("pushforward_sqrt needs a measure on [0,b]");
  if (cells == 0) cells = mu.cells();
  double s = std::sqrt(mu.domain().b);
  Domain out = Domain::half_line(s);
  double h = s / static_cast<double>(cells);
  std::vector<double> m(cells);
  for (size_t i = 0; i < cells; ++i) {
    double u = h * static_cast<double>(i), v = u + h;
    m[i] = mu.cdf(v * v) - mu.cdf(u * u);
  }
  return GridMeasure::from_masses(out, m);
}

GridMeasure poisson_smooth(const GridMeasure& mu, double r) {
  if (mu.domain().kind != DomainKind::Circle) throw DomainError("poisson_smooth needs a circle measure");
  if (!(r > 0.0 && r < 1.0)) throw DomainError("poisson_smooth needs r in (0,1)");
  size_t n = mu.cells();
  std::vector<double> kernel(n);
  double h = mu.width();
  double total = 0.0;
  for (size_t k = 0; k < n; ++k) {
    double t = h * static_cast<double>(k);
    kernel[k] = (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(t) + r * r);
    total += kernel[k];
  }
  for (double& w : kernel) w /= total;
  const auto& p = mu.density();
  std::vector<double> out(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += kernel[(i + n - j) % n] * p[j];
    out[i] = s;
  }
  return GridMeasure(mu.domain(), std::move(out));
}

GridMeasure mollify(const GridMeasure& mu, double eps) {
  if (!(eps > 0)) throw DomainError("mollify needs eps > 0");
  if (!mu.domain().on_line()) throw DomainError("mollify needs a measure on the line");
  double h = mu.width();
  long K = static_cast<long>(std::ceil(eps / h)) - 1;
  while (K > 0 && h * static_cast<double>(K) >= eps) --K;
  if (K < 0) K = 0;
  std::vector<double> w(2 * K + 1);
  double total = 0.0;
  for (long k = -K; k <= K; ++k) {
    w[k + K] = bump(h * static_cast<double>(k) / eps);
    total += w[k + K];
  }
  for (double& x : w) x /= total;
  size_t n = mu.cells();
  Domain d = Domain::real_line(mu.domain().a - h * K, mu.domain().b + h * K);
  std::vector<double> m(n + 2 * K, 0.0);
  for (size_t j = 0; j < n; ++j) {
    double mj = mu.mass(j);
    if (mj == 0.0) continue;
    for (long k = -K; k <= K; ++k) m[j + K + k] += mj * w[k + K];
  }
  return GridMeasure::from_masses(d, m);
}

GridMeasure rotate(const GridMeasure& mu, long cells_shift) {
  if (mu.domain().kind != DomainKind::Circle) throw DomainError("rotate needs a circle measure");
  long n = static_cast<long>(mu.cells());
  std::vector<double> d(n);
  for (long i = 0; i < n; ++i) d[((i + cells_shift) % n + n) % n] = mu.density()[i];
  return GridMeasure(mu.domain(), std::move(d));
}

GridMeasure mixture(const GridMeasure& a, const GridMeasure& b, double t) {
  if (!(a.domain() == b.domain()) || a.cells() != b.cells()) throw DomainError("mixture needs identical grids");
  std::vector<double> d(a.cells());
  for (size_t i = 0; i < d.size(); ++i) d[i] = (1.0 - t) * a.density()[i] + t * b.density()[i];
  return GridMeasure(a.domain(), std::move(d));
}

GridMeasure regrid(const GridMeasure& mu, Domain domain, size_t cells) {
  return GridMeasure::from_cdf(domain, cells, [&mu](double x) { return mu.cdf(x); });
}

void write_measure_csv(std::ostream& os, const GridMeasure& mu, const std::vector<double>* transform) {
  char buf[128];
  os << "domain,cells,a,b\n";
  std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g\n", domain_name(mu.domain().kind).c_str(), mu.cells(),
                mu.domain().a, mu.domain().b);
  os << buf;
  os << (transform ? "x,density,transform\n" : "x,density\n");
  for (size_t i = 0; i < mu.cells(); ++i) {
    if (transform)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mu.midpoint(i), mu.density()[i], (*transform)[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", mu.midpoint(i), mu.density()[i]);
    os << buf;
  }
}

GridMeasure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("domain,cells,a,b", 0) != 0)
    throw DomainError("measure csv: missing 'domain,cells,a,b' header");
  if (!std::getline(is, line)) throw DomainError("measure csv: missing domain row");
  std::stringstream ss(line);
  std::string tag, cells_s, a_s, b_s;
  std::getline(ss, tag, ',');
  std::getline(ss, cells_s, ',');
  std::getline(ss, a_s, ',');
  std::getline(ss, b_s, ',');
  DomainKind kind = parse_domain_name(tag);
  size_t cells = std::stoul(cells_s);
  double a = std::stod(a_s), b = std::stod(b_s);
  Domain d = kind == DomainKind::Circle ? Domain::circle()
             : kind == DomainKind::HalfLine ? Domain::half_line(b)
                                             : Domain::real_line(a, b);
  std::vector<double> dens;
  dens.reserve(cells);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'x') continue;
    std::stringstream row(line);
    std::string x_s, p_s;
    std::getline(row, x_s, ',');
    std::getline(row, p_s, ',');
    dens.push_back(std::stod(p_s));
  }
  if (dens.size() != cells) throw DomainError("measure csv: row count does not match cells");
  return GridMeasure(d, std::move(dens));
}

GridMeasure load_measure_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open measure file: " + path);
  return read_measure_csv(f);
}

}  // namespace freeprob
