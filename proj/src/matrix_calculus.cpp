#include "freeprob/matrix_calculus.hpp"

#include <algorithm>
#include <complex>

namespace freeprob {

namespace {

using cd = std::complex<double>;

struct UnitaryEigen {
  Eigen::VectorXd angles;
  CMat Q;
};

// Schur form of a normal matrix is diagonal, with a unitary change of basis.
UnitaryEigen unitary_eigen(const CMat& U) {
  Eigen::ComplexSchur<CMat> schur(U);
  UnitaryEigen e;
  long n = U.rows();
  e.angles.resize(n);
  for (long i = 0; i < n; ++i) e.angles[i] = wrap_angle(std::arg(schur.matrixT()(i, i)));
  e.Q = schur.matrixU();
  return e;
}

}  // namespace

SuTangentBasis su_basis(int n) {
  if (n < 2) throw DomainError("su(n) needs n >= 2");
  SuTangentBasis b;
  b.n = n;
  const cd I(0.0, 1.0);
  double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      CMat X = CMat::Zero(n, n);
      X(j, k) = s;
      X(k, j) = s;
      b.Y.push_back(I * X);
      CMat Z = CMat::Zero(n, n);
      Z(j, k) = -I * s;
      Z(k, j) = I * s;
      b.Y.push_back(I * Z);
    }
  for (int l = 1; l < n; ++l) {
    CMat D = CMat::Zero(n, n);
    double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) D(j, j) = c;
    D(l, l) = -c * l;
    b.Y.push_back(I * D);
  }
  return b;
}

ScalarFunction fn_exp() {
  auto e = [](double x) { return std::exp(x); };
  return {e, e, e, e};
}

ScalarFunction fn_power(int k) {
  auto p = [](int e, double c) {
    return [e, c](double x) { return e < 0 ? 0.0 : c * std::pow(x, e); };
  };
  double kk = k;
  return {p(k, 1.0), p(k - 1, kk), p(k - 2, kk * (kk - 1)), p(k - 3, kk * (kk - 1) * (kk - 2))};
}

ScalarFunction fn_cosh() {
  auto c = [](double x) { return std::cosh(x); };
  auto s = [](double x) { return std::sinh(x); };
  return {c, s, c, s};
}

DividedDifferenceTable::DividedDifferenceTable(ScalarFunction f, std::vector<double> points)
    : f_(std::move(f)), pts_(std::move(points)) {}

double DividedDifferenceTable::value(const std::vector<size_t>& idx) const {
  std::vector<double> x;
  for (size_t i : idx) x.push_back(pts_.at(i));
  return eval(std::move(x));
}

double DividedDifferenceTable::eval(std::vector<double> x) const {
  std::sort(x.begin(), x.end());
  size_t k = x.size() - 1;
  if (k == 0) return f_.f(x[0]);
  double scale = std::max({1.0, std::abs(x.front()), std::abs(x.back())});
  if (x.back() - x.front() < 1e-6 * scale) {
    double c = 0.0;
    for (double v : x) c += v;
    c /= static_cast<double>(x.size());
    switch (k) {
      case 1: return f_.d1(c);
      case 2: return f_.d2(c) / 2.0;
      case 3: return f_.d3(c) / 6.0;
      default: throw Unsupported("divided differences above order 3 at confluent points");
    }
  }
  std::vector<double> lo(x.begin(), x.end() - 1), hi(x.begin() + 1, x.end());
  return (eval(hi) - eval(lo)) / (x.back() - x.front());
}

CMat hermitian_function(const CMat& A, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  Eigen::VectorXcd d(A.rows());
  for (long i = 0; i < A.rows(); ++i) d[i] = f(es.eigenvalues()[i]);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_function(const ScalarFunction& f, const CMat& A) {
  Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  double s = 0.0;
  for (long i = 0; i < A.rows(); ++i) s += f.f(es.eigenvalues()[i]);
  return s;
}

double trace_derivative(const ScalarFunction& f, const CMat& A, const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  CMat Ht = es.eigenvectors().adjoint() * H * es.eigenvectors();
  double s = 0.0;
  for (long i = 0; i < A.rows(); ++i) s += f.d1(es.eigenvalues()[i]) * Ht(i, i).real();
  return s;
}

double trace_hessian(const ScalarFunction& f, const CMat& A, const CMat& H1, const CMat& H2) {
  Eigen::SelfAdjointEigenSolver<CMat> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  CMat V = es.eigenvectors();
  CMat A1 = V.adjoint() * H1 * V, A2 = V.adjoint() * H2 * V;
  std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + A.rows());
  DividedDifferenceTable dd({f.d1, f.d2, f.d3, {}}, lam);
  double s = 0.0;
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.rows(); ++j) s += dd.order1(i, j) * (A1(i, j) * A2(j, i)).real();
  return s;
}

Eigen::VectorXd eigenangles(const CMat& U) {
  Eigen::VectorXd a = unitary_eigen(U).angles;
  std::sort(a.data(), a.data() + a.size());
  return a;
}

CMat unitary_function(const CMat& U, const std::function<double(double)>& g) {
  auto e = unitary_eigen(U);
  Eigen::VectorXcd d(U.rows());
  for (long i = 0; i < U.rows(); ++i) d[i] = g(e.angles[i]);
  return e.Q * d.asDiagonal() * e.Q.adjoint();
}

CMat expm_skew(const CMat& Y) {
  CMat H = cd(0.0, -1.0) * Y;
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  Eigen::VectorXcd d(Y.rows());
  for (long i = 0; i < Y.rows(); ++i) d[i] = std::exp(cd(0.0, es.eigenvalues()[i]));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMat random_su(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(G);
  CMat Q = qr.householderQ();
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cd r = R(j, j);
    Q.col(j) *= r / std::abs(r);
  }
  cd det = Q.determinant();
  Q *= std::exp(cd(0.0, -std::arg(det) / n));
  return Q;
}

CMat random_su_near(const CMat& U, double scale, std::mt19937_64& rng) {
  int n = static_cast<int>(U.rows());
  auto basis = su_basis(n);
  std::normal_distribution<double> g(0.0, scale / std::sqrt(static_cast<double>(basis.Y.size())));
  CMat Y = CMat::Zero(n, n);
  for (const auto& Yk : basis.Y) Y += g(rng) * Yk;
  return U * expm_skew(Y);
}

double psi(const PotentialSpec& q, const CMat& U) {
  auto a = eigenangles(U);
  double s = 0.0;
  for (long i = 0; i < a.size(); ++i) s += q.Q(a[i]);
  return s;
}

CMat su_gradient(const PotentialSpec& q, const CMat& U) {
  long n = U.rows();
  CMat D = unitary_function(U, q.Qprime);
  cd tr = D.trace() / static_cast<double>(n);
  D -= tr * CMat::Identity(n, n);
  return cd(0.0, 1.0) * D;
}

std::vector<double> su_gradient_fd(const PotentialSpec& q, const CMat& U, const SuTangentBasis& basis, double h) {
  std::vector<double> out;
  for (const auto& Y : basis.Y)
    out.push_back((psi(q, U * expm_skew(h * Y)) - psi(q, U * expm_skew(-h * Y))) / (2.0 * h));
  return out;
}

HessianBound hessian_lower_bound(const PotentialSpec& q, const CMat& U_in, const SuTangentBasis& basis, double h,
                                 double cut_margin) {
  long n = U_in.rows();
  CMat U = U_in;
  HessianBound hb;
  if (cut_margin > 0.0) {
    // A central rotation by 2 pi/n keeps U in SU(n) and moves every angle off the cut.
    for (long attempt = 0; attempt < n; ++attempt) {
      auto a = eigenangles(U);
      bool near = false;
      for (long i = 0; i < a.size(); ++i) near = near || (a[i] + kPi < cut_margin) || (kPi - a[i] < cut_margin);
      if (!near) break;
      hb.flagged = true;
      U *= std::exp(cd(0.0, kTwoPi / static_cast<double>(n)));
    }
  }
  size_t d = basis.Y.size();
  auto f = [&](const std::vector<std::pair<size_t, double>>& x) {
    CMat Y = CMat::Zero(n, n);
    for (auto& [k, v] : x) Y += v * basis.Y[k];
    return psi(q, U * expm_skew(Y));
  };
  double f0 = psi(q, U);
  Eigen::MatrixXd H(d, d);
  for (size_t k = 0; k < d; ++k) {
    H(k, k) = (f({{k, h}}) - 2.0 * f0 + f({{k, -h}})) / (h * h);
    for (size_t l = k + 1; l < d; ++l) {
      double v = (f({{k, h}, {l, h}}) - f({{k, h}, {l, -h}}) - f({{k, -h}, {l, h}}) + f({{k, -h}, {l, -h}})) /
                 (4.0 * h * h);
      H(k, l) = v;
      H(l, k) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  hb.eigmin = es.eigenvalues()[0];
  hb.at = U;
  return hb;
}

double ricci_su(int n) {
  if (n < 2) throw DomainError("ricci_su needs n >= 2");
  return 0.5 * n;
}

double geodesic_distance_su(const CMat& U, const CMat& V) {
  CMat W = U.adjoint() * V;
  auto e = unitary_eigen(W);
  long n = W.rows();
  std::vector<double> phi(e.angles.data(), e.angles.data() + n);
  for (double p : phi)
    if (std::abs(std::exp(cd(0.0, p)) + 1.0) < 1e-9) throw NumericalError("geodesic_distance_su: eigenvalue at -1");
  std::sort(phi.begin(), phi.end());
  double sum = 0.0;
  for (double p : phi) sum += p;
  long m = std::lround(sum / kTwoPi);
  if (m > 0) {
    for (long k = 0; k < m; ++k) phi[n - 1 - k] -= kTwoPi;
  } else if (m < 0) {
    for (long k = 0; k < -m; ++k) phi[k] += kTwoPi;
  }
  double s = 0.0;
  for (double p : phi) s += p * p;
  return std::sqrt(s);
}

double relative_fisher_angles(const std::function<double(double)>& qmu_prime,
                              const std::function<double(double)>& q_prime, const std::vector<double>& angles,
                              bool traceless) {
  double n = static_cast<double>(angles.size());
  double s1 = 0.0, s2 = 0.0;
  for (double t : angles) {
    double d = qmu_prime(t) - q_prime(t);
    s1 += d;
    s2 += d * d;
  }
  return n * n * s2 - (traceless ? n * s1 * s1 : 0.0);
}

double relative_fisher_matrix_norm(const std::function<double(double)>& qmu_prime,
                                   const std::function<double(double)>& q_prime, const CMat& U) {
  auto a = eigenangles(U);
  return relative_fisher_angles(qmu_prime, q_prime, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace freeprob
