#include <doctest.h>

#include <random>

#include "freeprob/matrix_calculus.hpp"
#include "freeprob/transport.hpp"

using namespace freeprob;

TEST_CASE("semicircle dilation distance") {
  auto a = make_semicircle(2.0, 2000, Domain::real_line(-3, 3));
  auto b = make_semicircle(3.0, 2000, Domain::real_line(-3, 3));
  // Quantiles scale, so W = |1 - 3/2| sqrt(E x^2 / 2) with E x^2 = 1.
  CHECK(wasserstein_R(a, b) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-5));
  CHECK(wasserstein_R(a, a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("monotone coupling equals the LP optimum on midpoint atoms") {
  auto a = make_semicircle(2.0, 120, Domain::real_line(-3, 3));
  auto b = make_uniform(Domain::real_line(-1, 2), 90);
  CHECK(wasserstein_R_atoms(a, b) == doctest::Approx(wasserstein_R_lp(a, b)).epsilon(1e-9));
}

TEST_CASE("transportation LP on a small instance") {
  auto plan = solve_transport_lp({0.5, 0.5}, {0.25, 0.75}, {{0.0, 1.0}, {1.0, 0.0}});
  CHECK(plan.cost == doctest::Approx(0.25));
  double total = 0.0;
  for (auto& [i, j, w] : plan.entries) total += w;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("circle distances") {
  auto u = make_uniform(Domain::circle(), 128), n4 = make_nu_lambda(4.0, 128);
  CHECK(wasserstein_T_geodesic_atoms(u, n4) == doctest::Approx(wasserstein_T_geodesic_lp(u, n4)).epsilon(1e-8));
  CHECK(wasserstein_T_chord(u, n4) <= wasserstein_T_geodesic_atoms(u, n4) + 1e-12);
  CHECK(wasserstein_T_geodesic(u, n4) <= std::sqrt(2.0 / 16.0));
  auto r = rotate(n4, 10);
  // The rotation is one admissible plan, not necessarily the optimal one.
  CHECK(wasserstein_T_geodesic(r, n4) <= 10 * kTwoPi / 128 / std::sqrt(2.0));
  CHECK(wasserstein_T_geodesic_atoms(r, n4) == doctest::Approx(wasserstein_T_geodesic_lp(r, n4)).epsilon(1e-8));
}

TEST_CASE("cyclic-shift matching equals brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-kPi, kPi);
  for (int t = 0; t < 60; ++t) {
    int n = 1 + t % 7;
    std::vector<double> z(n), e(n);
    for (auto& x : z) x = U(rng);
    for (auto& x : e) x = U(rng);
    CHECK(optimal_matching_distance(z, e) == doctest::Approx(optimal_matching_distance_brute(z, e)).epsilon(1e-12));
  }
}

TEST_CASE("matrix contraction and special unitary matching bound") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  auto herm = [&](int n) {
    CMat A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = {N(rng), N(rng)};
    return CMat(0.5 * (A + A.adjoint()));
  };
  for (int t = 0; t < 20; ++t) {
    MatrixMeasure mu{{herm(2), herm(2)}, {0.3, 0.7}}, nu{{herm(2), herm(2), herm(2)}, {0.2, 0.3, 0.5}};
    CHECK(check_matrix_contraction(mu, nu).slack >= -1e-9);
  }
  for (int t = 0; t < 20; ++t) {
    int n = 2 + t % 2;
    auto A = random_su(n, rng);
    auto B = random_su_near(A, 0.5, rng);
    auto s = check_su_matching_bound(A, B);
    if (!s.skipped) CHECK(s.slack >= -1e-7);
  }
  CMat I = CMat::Identity(2, 2), V = CMat::Zero(2, 2);
  V(0, 0) = std::polar(1.0, 0.3);
  V(1, 1) = std::polar(1.0, -0.3);
  auto s = check_su_matching_bound(I, V);
  CHECK(s.lhs == doctest::Approx(s.rhs).epsilon(1e-10));
}
