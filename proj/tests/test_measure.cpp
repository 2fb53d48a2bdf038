#include <doctest.h>

#include <complex>
#include <random>
#include <sstream>

#include "freeprob/fft.hpp"
#include "freeprob/functionals.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/special.hpp"

using namespace freeprob;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  const auto& g = gauss_legendre(5);
  double s = 0.0, w = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    s += g.weights[i] * std::pow(g.nodes[i], 8);
    w += g.weights[i];
  }
  CHECK(w == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("clausen functions match known values") {
  // Cl2(pi/2) is Catalan's constant; Cl3(0) = zeta(3); Cl3(pi) = -3 zeta(3)/4.
  CHECK(clausen2(kPi / 2) == doctest::Approx(0.915965594177219015).epsilon(1e-13));
  CHECK(clausen3(0.0) == doctest::Approx(1.2020569031595942854).epsilon(1e-15));
  CHECK(clausen3(kPi - 1e-12) == doctest::Approx(-0.75 * 1.2020569031595942854).epsilon(1e-10));
  // Series check away from the expansion point.
  double s = 0.0;
  for (int k = 1; k < 200000; ++k) s += std::sin(2.0 * k) / (static_cast<double>(k) * k);
  CHECK(clausen2(2.0) == doctest::Approx(s).epsilon(1e-8));
}

TEST_CASE("log cell pair matches direct quadrature") {
  const auto& g = gauss_legendre(16);
  double a1 = 0.0, b1 = 0.5, a2 = 1.0, b2 = 1.7, s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    for (size_t j = 0; j < g.nodes.size(); ++j) {
      double x = 0.5 * (a1 + b1) + 0.5 * (b1 - a1) * g.nodes[i];
      double y = 0.5 * (a2 + b2) + 0.5 * (b2 - a2) * g.nodes[j];
      s += 0.25 * (b1 - a1) * (b2 - a2) * g.weights[i] * g.weights[j] * std::log(std::abs(x - y));
    }
  CHECK(log_cell_pair(a1, b1, a2, b2) == doctest::Approx(s).epsilon(1e-12));
  CHECK(unit_cell_log_average(0) == doctest::Approx(-1.5));
  CHECK(unit_cell_log_average(40) == doctest::Approx(log_cell_pair(0, 1, 40, 41)).epsilon(1e-12));
}

TEST_CASE("fft round trip and toeplitz apply") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  std::vector<std::complex<double>> x(37);
  for (auto& v : x) v = {N(rng), N(rng)};
  auto y = fft_inverse(fft_forward(x));
  for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);

  size_t n = 23;
  std::vector<double> kernel(2 * n - 1), v(n);
  for (auto& k : kernel) k = N(rng);
  for (auto& a : v) a = N(rng);
  ToeplitzOperator T(kernel);
  auto out = T.apply(v);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += kernel[i - j + n - 1] * v[j];
    CHECK(out[i] == doctest::Approx(s).epsilon(1e-10));
  }
  CirculantOperator C(std::vector<double>(kernel.begin(), kernel.begin() + n));
  auto oc = C.apply(v);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += kernel[(i + n - j) % n] * v[j];
    CHECK(oc[i] == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("closed-form measures have the right mass and moments") {
  auto g = make_semicircle(2.0, 2000);
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.moment(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(g.moment(2) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(g.moment(4) == doctest::Approx(2.0).epsilon(1e-5));

  auto nu = make_nu_lambda(8.0, 2048);
  CHECK(nu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  // First Fourier coefficient of nu_lambda is 1/lambda.
  double c1 = 0.0;
  for (size_t i = 0; i < nu.cells(); ++i) c1 += std::cos(nu.midpoint(i)) * nu.mass(i);
  CHECK(c1 == doctest::Approx(1.0 / 8.0).epsilon(1e-5));

  auto p = make_power_density(1.0, 1000);
  CHECK(p.moment(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  auto mp = make_marchenko_pastur(1.0, 2000);
  CHECK(mp.moment(1) == doctest::Approx(1.0).epsilon(1e-4));
  auto qc = make_quarter_circle(2.0, 2000);
  CHECK(qc.support().first >= 0.0);
  CHECK(make_uniform(Domain::circle(), 64).density()[7] == doctest::Approx(1.0));
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(GridMeasure(Domain::real_line(0, 1), {1.0, -0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(GridMeasure(Domain::real_line(0, 1), {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(parse_domain_name("sphere"), DomainError);
  std::istringstream bad("x,density\n0,1\n");
  CHECK_THROWS_AS(read_measure_csv(bad), DomainError);
}

TEST_CASE("quantiles and cdf are inverse") {
  auto g = make_semicircle(2.0, 1000);
  auto qt = cdf_quantile(g);
  CHECK(qt.quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  for (double t : {0.1, 0.37, 0.8}) CHECK(qt.cdf(qt.quantile(t)) == doctest::Approx(t).epsilon(1e-12));
  EmpiricalMeasure e(Domain::real_line(-1, 1), {0.5, -0.5, 0.0});
  CHECK(e.atoms.front() == -0.5);
  CHECK(e.moment(2) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("grid transformations preserve mass") {
  auto nu = make_nu_lambda(4.0, 256);
  CHECK(rotate(nu, 256).digest() == nu.digest());
  CHECK(rotate(nu, 17).total_mass() == doctest::Approx(1.0));
  auto g = make_semicircle(2.0, 500);
  auto r = regrid(g, Domain::real_line(-3, 3), 777);
  CHECK(r.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.moment(2) == doctest::Approx(g.moment(2)).epsilon(1e-3));
  auto m = mollify(g, 0.1);
  CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m.moment(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  auto mix = mixture(g, make_uniform(g.domain(), 500), 0.25);
  CHECK(mix.total_mass() == doctest::Approx(1.0));
  auto ps = poisson_smooth(make_uniform(Domain::circle(), 128), 0.5);
  CHECK(ps.density()[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetrization and square-root pushforward") {
  auto p = make_power_density(1.0, 800);
  auto s = symmetrize_sqrt(p);
  CHECK(s.moment(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(s.moment(2) == doctest::Approx(p.moment(1)).epsilon(1e-6));
  auto r = pushforward_sqrt(p);
  CHECK(r.domain().kind == DomainKind::HalfLine);
  CHECK(r.moment(2) == doctest::Approx(p.moment(1)).epsilon(1e-6));
  CHECK(r.moment(4) == doctest::Approx(p.moment(2)).epsilon(1e-5));
}

TEST_CASE("measure csv round trip preserves functionals") {
  for (const auto& mu : {make_semicircle(2.0, 300), make_nu_lambda(8.0, 256), make_power_density(2.0, 300)}) {
    std::stringstream ss;
    write_measure_csv(ss, mu);
    auto back = read_measure_csv(ss);
    CHECK(back.cells() == mu.cells());
    CHECK(back.domain() == mu.domain());
    CHECK(std::abs(sigma(back) - sigma(mu)) <= 1e-12);
    CHECK(std::abs(back.moment(2) - mu.moment(2)) <= 1e-12);
  }
}

TEST_CASE("spike measures have k arcs") {
  auto s = make_spike_measure(2, 8, 16);
  CHECK(s.total_mass() == doctest::Approx(1.0));
  size_t support = 0;
  for (double d : s.density()) support += d > 0.0;
  CHECK(support == 32);
}
