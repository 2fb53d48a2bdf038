#pragma once

#include <tuple>
#include <vector>

#include "freeprob/matrix_calculus.hpp"
#include "freeprob/measure.hpp"

namespace freeprob {

// Discrete plan; cost is sum of weights times the ground cost.
struct CouplingPlan {
  std::vector<std::tuple<size_t, size_t, double>> entries;
  double cost = 0.0;
};

// Exact transportation LP (transportation simplex with MODI pricing).
CouplingPlan solve_transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                                const std::vector<std::vector<double>>& cost);

// W = sqrt(inf int (1/2) d^2 dpi); the factor 1/2 sits inside the cost.
double wasserstein_R(const QuantileTable& a, const QuantileTable& b);
double wasserstein_R(const GridMeasure& mu, const GridMeasure& nu);
double wasserstein_R(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
double wasserstein_R(const GridMeasure& mu, const EmpiricalMeasure& nu);
double wasserstein_R(const EmpiricalMeasure& mu, const GridMeasure& nu);
// Quantile W of the cell-midpoint atoms (same discretization as the LP oracle).
double wasserstein_R_atoms(const GridMeasure& mu, const GridMeasure& nu);
// LP oracle on the cell midpoints (atoms of the cell masses).
double wasserstein_R_lp(const GridMeasure& mu, const GridMeasure& nu);

// Geodesic (angular) distance on the circle; angles in [-pi, pi).
double wasserstein_T_geodesic(const QuantileTable& a, const QuantileTable& b);
double wasserstein_T_geodesic(const GridMeasure& mu, const GridMeasure& nu);
double wasserstein_T_geodesic(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
// LP oracle with geodesic cost on cell-midpoint atoms.
double wasserstein_T_geodesic_lp(const GridMeasure& mu, const GridMeasure& nu);
// Geodesic W of the cell-midpoint atoms by the cut search (same discretization as the chord LP).
double wasserstein_T_geodesic_atoms(const GridMeasure& mu, const GridMeasure& nu);
// Chord cost (1/2)|e^{is} - e^{it}|^2 on cell-midpoint atoms; at most 512 cells each.
double wasserstein_T_chord(const GridMeasure& mu, const GridMeasure& nu);

// min over permutations of sqrt(sum d(zeta_i, eta_s(i))^2), d the angular distance.
double optimal_matching_distance(const std::vector<double>& zeta, const std::vector<double>& eta);
double optimal_matching_distance_brute(const std::vector<double>& zeta, const std::vector<double>& eta);

struct SlackReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool skipped = false;
};

// Discrete measure on Hermitian matrices.
struct MatrixMeasure {
  std::vector<CMat> atoms;
  std::vector<double> weights;
};
// slack = W(mu~, nu~)/sqrt(n) - W(mu^, nu^).
SlackReport check_matrix_contraction(const MatrixMeasure& mu, const MatrixMeasure& nu);
// slack = d(U, V) - delta(lambda(U), lambda(V)).
SlackReport check_su_matching_bound(const CMat& U, const CMat& V);

}  // namespace freeprob
