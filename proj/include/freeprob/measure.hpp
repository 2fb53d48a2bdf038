#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "freeprob/common.hpp"

namespace freeprob {

enum class DomainKind { RealLine, Circle, HalfLine };

struct Domain {
  DomainKind kind = DomainKind::RealLine;
  double a = 0.0;
  double b = 1.0;

  static Domain real_line(double a, double b);
  static Domain circle();
  static Domain half_line(double b);

  double length() const { return b - a; }
  // Mass per unit density per unit length: 1/(2 pi) on the circle (d theta / 2 pi).
  double density_scale() const { return kind == DomainKind::Circle ? 1.0 / kTwoPi : 1.0; }
  bool on_line() const { return kind != DomainKind::Circle; }
  bool operator==(const Domain& o) const { return kind == o.kind && a == o.a && b == o.b; }
};

std::string domain_name(DomainKind k);
DomainKind parse_domain_name(const std::string& s);

// Piecewise-constant probability density on a uniform grid.
class GridMeasure {
 public:
  GridMeasure() = default;
  // Densities are renormalized to unit mass; negative entries are rejected.
  GridMeasure(Domain domain, std::vector<double> density);
  static GridMeasure from_masses(Domain domain, const std::vector<double>& masses);
  // Exact cell masses from a cumulative distribution function.
  static GridMeasure from_cdf(Domain domain, size_t cells, const std::function<double(double)>& cdf);
  // Cell averages of a density by Gauss-Legendre quadrature.
  static GridMeasure from_density(Domain domain, size_t cells, const std::function<double(double)>& p,
                                  int nodes_per_cell = 8);

  const Domain& domain() const { return domain_; }
  size_t cells() const { return density_.size(); }
  double width() const { return domain_.length() / static_cast<double>(density_.size()); }
  double edge(size_t i) const { return domain_.a + width() * static_cast<double>(i); }
  double midpoint(size_t i) const { return domain_.a + width() * (static_cast<double>(i) + 0.5); }
  const std::vector<double>& density() const { return density_; }
  double density_at(double x) const;
  double mass(size_t i) const { return density_[i] * width() * domain_.density_scale(); }
  std::vector<double> masses() const;
  std::vector<double> midpoints() const;

  double cdf(double x) const;
  double moment(int k) const;
  double total_mass() const;
  std::pair<double, double> support() const;
  std::string digest() const;

 private:
  Domain domain_;
  std::vector<double> density_;
  std::vector<double> cumulative_;  // cumulative_[i] = mass of cells < i
};

// Equal-weight atoms, sorted ascending.
struct EmpiricalMeasure {
  Domain domain;
  std::vector<double> atoms;

  EmpiricalMeasure() = default;
  EmpiricalMeasure(Domain d, std::vector<double> a);
  double moment(int k) const;
};

// Quantile function as a list of pieces, linear in t on [t0, t1].
struct QuantileTable {
  struct Piece {
    double t0, t1, x0, x1;
  };
  std::vector<Piece> pieces;

  double quantile(double t) const;
  double cdf(double x) const;
};

inline constexpr double kLambdaInfinity = std::numeric_limits<double>::infinity();

GridMeasure make_semicircle(double r, size_t cells);
GridMeasure make_semicircle(double r, size_t cells, Domain domain, double center = 0.0);
GridMeasure make_nu_lambda(double lambda, size_t cells, double phase = 0.0);
GridMeasure make_power_density(double alpha, size_t cells);
GridMeasure make_uniform(Domain domain, size_t cells);
GridMeasure make_quarter_circle(double r, size_t cells, double b = -1.0);
// Law of x^2 when x ~ semicircle of radius 2/sqrt(rho).
GridMeasure make_marchenko_pastur(double rho, size_t cells, double b = -1.0);
// Uniform on k arcs of length 2 pi/(k n), centered at equally spaced points.
GridMeasure make_spike_measure(int k, int n, size_t cells_per_arc);

QuantileTable cdf_quantile(const GridMeasure& mu);
QuantileTable cdf_quantile(const EmpiricalMeasure& mu);
QuantileTable cdf_quantile_weighted(std::vector<double> atoms, std::vector<double> weights);

GridMeasure symmetrize_sqrt(const GridMeasure& mu, size_t cells = 0);
GridMeasure pushforward_sqrt(const GridMeasure& mu, size_t cells = 0);
GridMeasure poisson_smooth(const GridMeasure& mu, double r);
GridMeasure mollify(const GridMeasure& mu, double eps);
GridMeasure rotate(const GridMeasure& mu, long cells_shift);
GridMeasure mixture(const GridMeasure& a, const GridMeasure& b, double t);
// Resample onto another grid by exact cell-overlap masses.
GridMeasure regrid(const GridMeasure& mu, Domain domain, size_t cells);

void write_measure_csv(std::ostream& os, const GridMeasure& mu,
                       const std::vector<double>* transform = nullptr);
GridMeasure read_measure_csv(std::istream& is);
GridMeasure load_measure_csv(const std::string& path);

}  // namespace freeprob
