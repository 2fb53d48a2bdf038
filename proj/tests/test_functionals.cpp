#include <doctest.h>

#include "freeprob/equilibrium.hpp"
#include "freeprob/functionals.hpp"
#include "freeprob/special.hpp"

using namespace freeprob;

TEST_CASE("semicircle relative entropy and fisher information") {
  for (double rho : {1.0, 4.0})
    for (double alpha : {1.0, 2.0, 4.0}) {
      double r = 2.0 / std::sqrt(alpha);
      auto g = make_semicircle(r, 2048, Domain::real_line(-1.05 * r, 1.05 * r));
      auto q = quadratic_potential(rho);
      double B = -0.5 * std::log(rho) - 0.75;
      double expect = 0.5 * std::log(alpha) + rho / (2 * alpha) - 0.5 * std::log(rho) - 0.5;
      CHECK(relative_free_entropy(g, q, B) == doctest::Approx(expect).scale(1.0).epsilon(1e-5));
      CHECK(fisher_rel_R(g, q).get() == doctest::Approx((alpha - rho) * (alpha - rho) / alpha).scale(1.0).epsilon(1e-4));
      CHECK(fisher_rel_R_hilbert(g, q) == doctest::Approx(fisher_rel_R(g, q).get()).scale(1.0).epsilon(1e-4));
    }
}

TEST_CASE("fisher information of the semicircle and voiculescu equality") {
  auto g = make_semicircle(2.0, 2048, Domain::real_line(-2.1, 2.1));
  CHECK(fisher_R(g).get() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(chi(g) == doctest::Approx(0.5 + 0.5 * std::log(kTwoPi)).epsilon(1e-5));
}

TEST_CASE("circle closed forms") {
  for (double lambda : {4.0, 8.0})
    for (double alpha : {4.0, 16.0}) {
      auto nu = make_nu_lambda(alpha, 2048);
      auto q = cosine_potential(lambda);
      double d = 1.0 / alpha - 1.0 / lambda;
      CHECK(relative_free_entropy(nu, q, 1.0 / (lambda * lambda)) == doctest::Approx(d * d).scale(1.0).epsilon(1e-6));
      CHECK(fisher_rel_T(nu, q).get() == doctest::Approx(2 * d * d).scale(1.0).epsilon(1e-6));
      CHECK(fisher_rel_T_hilbert(nu, q) == doctest::Approx(2 * d * d).scale(1.0).epsilon(1e-5));
    }
  auto n4 = make_nu_lambda(4.0, 2048);
  // -Sigma(nu_4) <= F(nu_4) with F = (1/3)(-1 + int p^3).
  CHECK(-sigma(n4) <= fisher_T(n4).get());
  CHECK(fisher_T(make_uniform(Domain::circle(), 64)).get() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("extended values") {
  auto v = fisher_R(GridMeasure(Domain::real_line(0, 1), {1.0, 0.0, 1.0, 1.0, 2.0, 0.0, 1.0, 1.0}));
  CHECK(v.is_finite());
  Extended e = Extended::plus_infinity();
  CHECK_THROWS_AS(e.get(), NumericalError);
  CHECK(e.str() == "inf");
}

TEST_CASE("half-line fisher closed forms") {
  for (double a : {0.0, 1.0, 2.0}) {
    auto p = make_power_density(a, 2048);
    double f = 4 * std::pow(a + 1, 3) / 3;
    CHECK(fisher_R(p).get() / (kPi * kPi) == doctest::Approx(f / (3 * a + 1)).epsilon(1e-4));
    CHECK(fisher_halfline(p).get() / (kPi * kPi) == doctest::Approx(f / (3 * a + 2)).epsilon(1e-4));
  }
}

TEST_CASE("relative entropy") {
  auto u = make_uniform(Domain::circle(), 256);
  CHECK(relative_entropy(u, u).get() == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  auto half = GridMeasure(Domain::circle(), std::vector<double>(256, 1.0));
  auto bumpy = make_nu_lambda(4.0, 256);
  CHECK(relative_entropy(bumpy, half).get() > 0.0);
  std::vector<double> d(256, 1.0);
  d[0] = 0.0;
  CHECK_FALSE(relative_entropy(u, GridMeasure(Domain::circle(), d)).is_finite());
}

TEST_CASE("two-measure free relative entropy is nonnegative and zero on the diagonal") {
  auto a = make_semicircle(2.0, 500, Domain::real_line(-3, 3));
  auto b = make_uniform(Domain::real_line(-3, 3), 500);
  CHECK(free_relative_entropy_two_measure(a, a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(free_relative_entropy_two_measure(a, b) > 0.0);
}

TEST_CASE("functional dispatch by name") {
  auto g = make_semicircle(2.0, 2000);
  auto v = evaluate_functional("sigma", g, nullptr, 0.0);
  CHECK(v.value.get() == doctest::Approx(-0.25).epsilon(1e-5));
  CHECK(v.digest == g.digest());
  CHECK_THROWS(evaluate_functional("no-such-functional", g, nullptr, 0.0));
}
