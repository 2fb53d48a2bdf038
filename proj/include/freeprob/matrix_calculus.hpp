#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "freeprob/potential.hpp"

namespace freeprob {

using CMat = Eigen::MatrixXcd;

// Orthonormal basis of su(n) for Re Tr(A* B): generalized Gell-Mann matrices times sqrt(-1).
struct SuTangentBasis {
  int n = 0;
  std::vector<CMat> Y;
};
SuTangentBasis su_basis(int n);

// A scalar function with derivatives up to third order.
struct ScalarFunction {
  std::function<double(double)> f, d1, d2, d3;
};
ScalarFunction fn_exp();
ScalarFunction fn_power(int k);
ScalarFunction fn_cosh();

// Divided differences f^[r] of one function at r+1 points; confluent and near-confluent groups
// use the Taylor limit f^(k)(c)/k!.
class DividedDifferenceTable {
 public:
  DividedDifferenceTable(ScalarFunction f, std::vector<double> points);
  // f^[r](x_{i0}, ..., x_{ir}) for the listed point indices.
  double value(const std::vector<size_t>& idx) const;
  double order1(size_t i, size_t j) const { return value({i, j}); }
  double order2(size_t i, size_t j, size_t k) const { return value({i, j, k}); }
  const std::vector<double>& points() const { return pts_; }

 private:
  double eval(std::vector<double> x) const;
  ScalarFunction f_;
  std::vector<double> pts_;
};

// Hermitian helpers.
CMat hermitian_function(const CMat& A, const std::function<double(double)>& f);
double trace_function(const ScalarFunction& f, const CMat& A);
// Tr(f'(A) H).
double trace_derivative(const ScalarFunction& f, const CMat& A, const CMat& H);
// sum_ij (f')^[1](l_i, l_j) (U*H1U)_ij (U*H2U)_ji.
double trace_hessian(const ScalarFunction& f, const CMat& A, const CMat& H1, const CMat& H2);

// Unitary helpers. Eigenangles are in [-pi, pi).
Eigen::VectorXd eigenangles(const CMat& U);
CMat unitary_function(const CMat& U, const std::function<double(double)>& g);
CMat expm_skew(const CMat& Y);
CMat random_su(int n, std::mt19937_64& rng);
// exp of a random su(n) element of HS norm about `scale`.
CMat random_su_near(const CMat& U, double scale, std::mt19937_64& rng);

// Psi(U) = Tr Q(U).
double psi(const PotentialSpec& q, const CMat& U);
// sqrt(-1)(Q'(U) - (1/n) Tr Q'(U) I).
CMat su_gradient(const PotentialSpec& q, const CMat& U);
// Directional derivatives of Psi(U exp(t Y_k)) by central differences.
std::vector<double> su_gradient_fd(const PotentialSpec& q, const CMat& U, const SuTangentBasis& basis,
                                   double h = 1e-5);

struct HessianBound {
  double eigmin = 0.0;
  bool flagged = false;  // an eigenangle sits near the branch cut at -pi
  CMat at;               // point actually used
};
// Smallest eigenvalue of the finite-difference Hessian of Psi in normal coordinates.
HessianBound hessian_lower_bound(const PotentialSpec& q, const CMat& U, const SuTangentBasis& basis,
                                 double h = 1e-3, double cut_margin = 0.0);

double ricci_su(int n);

// Hilbert-Schmidt length of the shortest traceless logarithm of U*V.
double geodesic_distance_su(const CMat& U, const CMat& V);

// n^2 Tr D^2 - n (Tr D)^2 with D = Qmu'(U) - Q'(U).
double relative_fisher_matrix_norm(const std::function<double(double)>& qmu_prime,
                                   const std::function<double(double)>& q_prime, const CMat& U);
// Same quantity from the eigenangles; traceless = false gives the U(n) version n^2 sum d^2.
double relative_fisher_angles(const std::function<double(double)>& qmu_prime,
                              const std::function<double(double)>& q_prime, const std::vector<double>& angles,
                              bool traceless = true);

}  // namespace freeprob
