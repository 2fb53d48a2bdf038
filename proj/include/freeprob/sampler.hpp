#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "freeprob/measure.hpp"
#include "freeprob/potential.hpp"

namespace freeprob {

enum class EnsembleKind { SelfAdjoint, Restricted, SpecialUnitary, Unitary, Positive };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::SelfAdjoint;
  PotentialSpec q;
  int n = 2;
  double R = 0.0;           // Restricted only
  bool orthogonal = false;  // beta = 1 weight exp(-(n/2) sum Q) prod |x_i - x_j|
};

std::string ensemble_name(EnsembleKind k);
// Parses self-adjoint, restricted:R=.., su, u, positive.
EnsembleKind parse_ensemble_kind(const std::string& s, double* R);

// Unnormalized log density; SU takes the n-1 free angles, U all n. -inf off the domain or at coincidences.
double log_joint_density(const EnsembleSpec& spec, const std::vector<double>& positions);
// All n points, including the determined SU angle, sorted.
std::vector<double> all_points(const EnsembleSpec& spec, const std::vector<double>& positions);

// min(1, P(y)/P(x)) for the Metropolis rule.
double metropolis_accept_ratio(const EnsembleSpec& spec, const std::vector<double>& x, const std::vector<double>& y);

struct ChainState {
  std::vector<double> positions;
  double log_density = 0.0;
  std::uint64_t seed = 0;
  long sweeps = 0;
  long accepted = 0;
  long proposed = 0;
  double step = 0.1;
};

// Positions at the (j - 1/2)/n quantiles of the target.
ChainState quantile_init(const EnsembleSpec& spec, const GridMeasure& target);

struct SampleOptions {
  int sweeps = 1000;
  int burn_in = 500;
  int chains = 1;
  int thin = 1;
  std::uint64_t seed = 1;
  const GridMeasure* init_target = nullptr;  // quantile warm start when set
};

struct ChainDiagnostics {
  double acceptance = 0.0;       // after burn-in
  double burn_acceptance = 0.0;  // during burn-in
  double step = 0.0;
  long samples = 0;
  // First burn-in sweep at which the tuning window reported acceptance in [0.2, 0.5]; -1 if never.
  long tuned_at = -1;
};

struct SampleResult {
  std::vector<EmpiricalMeasure> samples;  // chain-major order
  std::vector<ChainDiagnostics> chains;
};

SampleResult sample(const EnsembleSpec& spec, const SampleOptions& opt);

// Derived per-chain seeds from a master seed.
std::uint64_t chain_seed(std::uint64_t master, std::uint64_t index);

// Exact Gaussian sampler for the ensemble with Q = rho x^2/2.
EmpiricalMeasure gue_direct(int n, double rho, std::mt19937_64& rng);

struct BruteResult {
  double log_z = 0.0;
  std::vector<double> means;  // E[(1/n) sum f(x_i)] for each observable
};
// log Z~_n by tensor Gauss-Legendre (line) or trapezoid (torus) quadrature, n in {2, 3}.
// Torus integrals use d theta/2 pi in every coordinate.
BruteResult brute_normalizer(const EnsembleSpec& spec,
                             const std::vector<std::function<double(double)>>& observables = {});

// Histogram average of the samples on the given grid.
GridMeasure mean_eigenvalue_distribution(const std::vector<EmpiricalMeasure>& samples, const Domain& domain,
                                         size_t cells);
// All atoms of all samples, equal weights.
EmpiricalMeasure pooled(const std::vector<EmpiricalMeasure>& samples);

// Worker count from FREEPROB_WORKERS, else the hardware concurrency.
int worker_count();

}  // namespace freeprob
