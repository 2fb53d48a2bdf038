#pragma once

#include <functional>
#include <string>

#include "freeprob/measure.hpp"
#include "freeprob/potential.hpp"

namespace freeprob {

struct FunctionalValue {
  std::string name;
  Extended value;
  std::string digest;
};

// int f dmu with a Gauss-Legendre rule in every cell.
double integrate(const GridMeasure& mu, const std::function<double(double)>& f, int nodes_per_cell = 3);

double sigma(const GridMeasure& mu);
double chi(const GridMeasure& mu);
double weighted_energy(const GridMeasure& mu, const PotentialSpec& q);
// -Sigma(mu) + int Q dmu + B; B must come from the caller.
double relative_free_entropy(const GridMeasure& mu, const PotentialSpec& q, double B);

// Line: Phi = (4 pi^2/3) int p^3; the Hilbert route 4 int (Hp)^2 dmu is the cross-check.
Extended fisher_R(const GridMeasure& mu);
double fisher_R_hilbert(const GridMeasure& mu);
// Phi_Q = Phi - 2 int int (Q')^[1] dmu dmu + int Q'^2 dmu.
Extended fisher_rel_R(const GridMeasure& mu, const PotentialSpec& q);
double fisher_rel_R_hilbert(const GridMeasure& mu, const PotentialSpec& q);

// Circle: F = (1/3)(-1 + int p^3 dzeta).
Extended fisher_T(const GridMeasure& mu);
double fisher_T_hilbert(const GridMeasure& mu);
Extended fisher_rel_T(const GridMeasure& mu, const PotentialSpec& q);
double fisher_rel_T_hilbert(const GridMeasure& mu, const PotentialSpec& q);

// Half-line: Phi+_Q(mu) computed as Phi_{Q~}(mu~) on the symmetrized measure.
Extended fisher_halfline(const GridMeasure& mu);
Extended fisher_rel_halfline(const GridMeasure& mu, const PotentialSpec& q);
// 4 int x (Hp - Q'/2)^2 dmu with the half-line transform.
double fisher_rel_halfline_hilbert(const GridMeasure& mu, const PotentialSpec& q);
double fisher_halfline_hilbert(const GridMeasure& mu);

// Sigma~+_Q(mu) = -Sigma(mu) + int Q dmu + B+.
double relative_free_entropy_halfline(const GridMeasure& mu, const PotentialSpec& q, double Bplus);

// S(mu, nu) = int log(dmu/dnu) dmu; nu is resampled onto mu's grid when the grids differ.
Extended relative_entropy(const GridMeasure& mu, const GridMeasure& nu);

// -int int log|x-y| d(mu-nu) d(mu-nu), nonnegative.
double free_relative_entropy_two_measure(const GridMeasure& mu, const GridMeasure& nu);

// Name-based dispatch used by the CLI.
FunctionalValue evaluate_functional(const std::string& name, const GridMeasure& mu, const PotentialSpec* q,
                                    double B);

}  // namespace freeprob
