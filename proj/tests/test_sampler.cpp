#include <doctest.h>

#include <algorithm>
#include <random>

#include "freeprob/sampler.hpp"
#include "freeprob/transport.hpp"

using namespace freeprob;

namespace {

EnsembleSpec spec_of(EnsembleKind kind, PotentialSpec q, int n, double R = 0.0) {
  EnsembleSpec s;
  s.kind = kind;
  s.q = std::move(q);
  s.n = n;
  s.R = R;
  return s;
}

}  // namespace

TEST_CASE("log joint density values") {
  auto s = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 2);
  CHECK(log_joint_density(s, {0.0, 1.0}) == doctest::Approx(-1.0));
  CHECK(log_joint_density(s, {0.5, 0.5}) == -std::numeric_limits<double>::infinity());
  auto r = spec_of(EnsembleKind::Restricted, quadratic_potential(1.0), 2, 1.0);
  CHECK(log_joint_density(r, {0.0, 1.5}) == -std::numeric_limits<double>::infinity());
  auto p = spec_of(EnsembleKind::Positive, linear_halfline_potential(1.0), 2);
  CHECK(log_joint_density(p, {-0.1, 1.0}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("orthogonal variant halves exponent and vandermonde power") {
  auto s = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 3);
  auto o = s;
  o.orthogonal = true;
  std::vector<double> x{-0.7, 0.2, 1.3};
  CHECK(log_joint_density(o, x) == doctest::Approx(0.5 * log_joint_density(s, x)).epsilon(1e-14));
}

TEST_CASE("special unitary density at n = 2") {
  auto s = spec_of(EnsembleKind::SpecialUnitary, zero_circle_potential(), 2);
  for (double t : {0.3, 1.1, 2.5}) CHECK(log_joint_density(s, {t}) == doctest::Approx(std::log(4 * std::sin(t) * std::sin(t))));
  auto pts = all_points(s, {0.4});
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] + pts[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("detailed balance of the accept ratio") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  auto s = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 4);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(4), y(4);
    for (auto& v : x) v = N(rng);
    for (auto& v : y) v = N(rng);
    double lhs = metropolis_accept_ratio(s, x, y) * std::exp(log_joint_density(s, x));
    double rhs = metropolis_accept_ratio(s, y, x) * std::exp(log_joint_density(s, y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("quantile initialization") {
  auto g = make_semicircle(2.0, 4000);
  auto s = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 4);
  auto c = quantile_init(s, g);
  auto qt = cdf_quantile(g);
  REQUIRE(c.positions.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(c.positions[j] == doctest::Approx(qt.quantile((j + 0.5) / 4)).epsilon(1e-12));
  auto u = spec_of(EnsembleKind::Unitary, zero_circle_potential(), 4);
  auto cu = quantile_init(u, make_uniform(Domain::circle(), 256));
  for (int j = 1; j < 4; ++j) CHECK(cu.positions[j] - cu.positions[j - 1] == doctest::Approx(kTwoPi / 4));
}

TEST_CASE("brute normalizers with closed forms") {
  // Z~_2 for the Gaussian weight exp(-2 sum x^2/2) (x1 - x2)^2 is pi.
  auto g2 = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 2);
  CHECK(std::exp(brute_normalizer(g2).log_z) == doctest::Approx(kPi).epsilon(1e-8));
  auto g3 = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 3);
  CHECK(brute_normalizer(g3).log_z == doctest::Approx(0.2979669504).epsilon(1e-8));
  auto su2 = spec_of(EnsembleKind::SpecialUnitary, zero_circle_potential(), 2);
  CHECK(std::exp(brute_normalizer(su2).log_z) == doctest::Approx(2.0).epsilon(1e-10));
  auto su3 = spec_of(EnsembleKind::SpecialUnitary, zero_circle_potential(), 3);
  CHECK(std::exp(brute_normalizer(su3).log_z) == doctest::Approx(6.0).epsilon(1e-8));
  auto u2 = spec_of(EnsembleKind::Unitary, zero_circle_potential(), 2);
  CHECK(std::exp(brute_normalizer(u2).log_z) == doctest::Approx(2.0).epsilon(1e-10));
  auto u3 = spec_of(EnsembleKind::Unitary, zero_circle_potential(), 3);
  CHECK(std::exp(brute_normalizer(u3).log_z) == doctest::Approx(6.0).epsilon(1e-6));
  auto big = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 4);
  CHECK_THROWS_AS(brute_normalizer(big), Unsupported);
}

TEST_CASE("restricted normalizer equals the integral over the box") {
  auto flat = custom_potential(DomainKind::RealLine, [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0,
                               "zero");
  auto r = spec_of(EnsembleKind::Restricted, flat, 2, 1.0);
  // int int_{[-1,1]^2} (x - y)^2 = 8/3.
  CHECK(std::exp(brute_normalizer(r).log_z) == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("sampler agrees with brute-force means at n = 2") {
  auto s = spec_of(EnsembleKind::SelfAdjoint, quadratic_potential(1.0), 2);
  auto sq = [](double x) { return x * x; };
  auto exact = brute_normalizer(s, {sq}).means[0];
  SampleOptions o;
  o.sweeps = 20000;
  o.burn_in = 500;
  o.chains = 4;
  o.seed = 21;
  auto r = sample(s, o);
  std::vector<double> m(4, 0.0);
  size_t per = r.samples.size() / 4;
  for (int c = 0; c < 4; ++c) {
    for (size_t k = 0; k < per; ++k)
      for (double x : r.samples[c * per + k].atoms) m[c] += sq(x) / 2.0;
    m[c] /= static_cast<double>(per);
  }
  double mean = (m[0] + m[1] + m[2] + m[3]) / 4, var = 0.0;
  for (double v : m) var += (v - mean) * (v - mean) / 3.0;
  CHECK(std::abs(mean - exact) <= 4.0 * std::sqrt(var / 4.0) + 1e-3);
  for (const auto& d : r.chains) {
    CHECK(d.acceptance >= 0.2);
    CHECK(d.acceptance <= 0.5);
  }
}

TEST_CASE("special unitary samples keep the determinant constraint") {
  auto s = spec_of(EnsembleKind::SpecialUnitary, cosine_potential(8.0), 5);
  SampleOptions o;
  o.sweeps = 200;
  o.burn_in = 100;
  o.seed = 4;
  auto r = sample(s, o);
  for (const auto& e : r.samples) {
    double t = 0.0;
    for (double a : e.atoms) t += a;
    CHECK(std::abs(std::remainder(t, kTwoPi)) < 1e-10);
  }
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  auto s = spec_of(EnsembleKind::Positive, linear_halfline_potential(1.0), 6);
  SampleOptions o;
  o.sweeps = 50;
  o.burn_in = 50;
  o.chains = 3;
  o.seed = 77;
  auto a = sample(s, o), b = sample(s, o);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].atoms == b.samples[i].atoms);
  for (const auto& e : a.samples)
    for (double x : e.atoms) CHECK(x >= 0.0);
  CHECK(chain_seed(77, 0) != chain_seed(77, 1));
}

TEST_CASE("gue direct second moment") {
  std::mt19937_64 rng(2);
  double m2 = 0.0;
  for (int t = 0; t < 20; ++t) m2 += gue_direct(100, 4.0, rng).moment(2) / 20;
  CHECK(m2 == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("ensemble names") {
  double R = 0.0;
  CHECK(parse_ensemble_kind("restricted:R=2.5", &R) == EnsembleKind::Restricted);
  CHECK(R == 2.5);
  CHECK(parse_ensemble_kind("gue", &R) == EnsembleKind::SelfAdjoint);
  CHECK(parse_ensemble_kind("su", &R) == EnsembleKind::SpecialUnitary);
  CHECK_THROWS(parse_ensemble_kind("goe", &R));
}
