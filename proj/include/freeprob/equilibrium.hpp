#pragma once

#include <optional>
#include <string>

#include "freeprob/measure.hpp"
#include "freeprob/potential.hpp"

namespace freeprob {

struct EquilibriumResult {
  GridMeasure mu_Q;
  double B = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string source;  // "closed-form" or "solver"
};

struct SolverOptions {
  int max_iterations = 40000;
  double tolerance = 1e-11;  // projected-gradient step, sup norm on masses
  bool throw_on_failure = true;
};

// Minimizes E_Q over probability vectors on the grid of the window.
// B = Sigma(mu_Q) - int Q dmu_Q, which is -E_Q(mu_Q) on every domain.
EquilibriumResult solve_equilibrium(const PotentialSpec& q, const Domain& window, size_t cells,
                                    const SolverOptions& opt = {});
EquilibriumResult solve_equilibrium(const PotentialSpec& q, size_t cells, const SolverOptions& opt = {});

std::optional<EquilibriumResult> closed_form_equilibrium(const PotentialSpec& q, size_t cells);

// sup over cells with density above 1e-2 of the maximum of |Q - Q_mu - c|, c the weighted mean.
double euler_lagrange_residual(const GridMeasure& mu, const PotentialSpec& q);

// Closed form when available, solver otherwise.
EquilibriumResult equilibrium(const PotentialSpec& q, size_t cells);

}  // namespace freeprob
