#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "freeprob/equilibrium.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/potential.hpp"
#include "freeprob/sampler.hpp"

namespace freeprob {

struct VerificationReport {
  std::string id;
  std::string suite;
  std::string inequality;  // always of the form lhs <= rhs
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool pass = false;
  bool vacuous = false;  // rhs = +inf; excluded from pass statistics
  std::string b_source;  // closed-form, solver, brute-normalizer or none
  std::uint64_t seed = 0;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json data = nlohmann::json::object();
  double runtime = 0.0;  // seconds; not serialized

  nlohmann::json to_json() const;
};

// Fills slack, tolerance (1e-4 (1 + |rhs|) unless given) and pass.
VerificationReport make_report(std::string id, std::string inequality, double lhs, double rhs,
                               std::optional<double> tol = std::nullopt);

// Rejects inputs whose potential violates the convexity hypothesis on the given interval.
void require_convexity(const PotentialSpec& q, double rho, double a, double b);

// Equilibrium data used by the checks; computed when not supplied.
VerificationReport verify_lsi_R(const GridMeasure& mu, const PotentialSpec& q, double rho,
                                const EquilibriumResult* eq = nullptr);
VerificationReport verify_voiculescu(const GridMeasure& mu);
VerificationReport verify_lsi_T(const GridMeasure& mu, const PotentialSpec& q, double rho,
                                const EquilibriumResult* eq = nullptr);
VerificationReport verify_tci_R(const GridMeasure& mu, const PotentialSpec& q, double rho,
                                const EquilibriumResult* eq = nullptr);
// Geodesic TCI; with chord = true a second report checks W_chord <= W_geodesic on midpoint atoms.
std::vector<VerificationReport> verify_tci_T(const GridMeasure& mu, const PotentialSpec& q, double rho,
                                             bool chord = false, const EquilibriumResult* eq = nullptr);
// LSI+, TCI+ and the chi-versus-Phi+ bound, in that order.
std::vector<VerificationReport> verify_halfline(const GridMeasure& mu, const PotentialSpec& q, double rho,
                                                const EquilibriumResult* eq = nullptr);

// Q_mu(x) = 2 int log|x - y| dmu(y) as a potential.
PotentialSpec log_potential_spec(const GridMeasure& mu);

struct TrendReport {
  std::vector<int> n;
  std::vector<double> values;
  std::vector<double> std_errors;  // Monte Carlo only
  double target = 0.0;
  std::string note;
};

// Exact n = 2, 3 values of (1/n^2) S(lambda_n(Q_mu; R), lambda_n(Q)) through brute-force normalizers.
// On the circle the special unitary ensembles are used and R is ignored.
TrendReport scaling_limit_entropy(const GridMeasure& mu, const PotentialSpec& q, double R, double target,
                                  const std::vector<int>& n_list = {2, 3});
// Monte Carlo estimates of (1/n^3) E |grad log(d lambda(Q_mu)/d lambda(Q))|^2 over SU(n) or U(n).
TrendReport scaling_limit_fisher(const GridMeasure& mu, const PotentialSpec& q, const std::vector<int>& n_list,
                                 int sweeps, std::uint64_t seed, double target, int chains = 8,
                                 EnsembleKind kind = EnsembleKind::SpecialUnitary);

std::vector<VerificationReport> ratio_studies();

const std::vector<std::string>& suite_names();
// Runs one suite (or "all"); reports are sorted by id.
std::vector<VerificationReport> run_suite(const std::string& suite, std::uint64_t seed, size_t cells = 2000);

// Runs independent jobs on a bounded worker pool and sorts the result by id.
std::vector<VerificationReport> run_jobs(const std::vector<std::function<std::vector<VerificationReport>()>>& jobs);

struct SuiteSummary {
  std::string suite;
  int total = 0;
  int passed = 0;
  int failed = 0;
  int vacuous = 0;
  double worst_ratio = 0.0;  // max lhs/rhs over non-vacuous inequality reports with rhs above tolerance
  double runtime = 0.0;
};
std::vector<SuiteSummary> summarize(const std::vector<VerificationReport>& reports);
std::string format_summary(const std::vector<SuiteSummary>& s, bool with_runtime);

}  // namespace freeprob
