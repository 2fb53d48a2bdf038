#include <doctest.h>

#include "freeprob/harness.hpp"

using namespace freeprob;

TEST_CASE("report bookkeeping") {
  auto r = make_report("x", "a <= b", 1.0, 2.0);
  CHECK(r.slack == doctest::Approx(1.0));
  CHECK(r.tolerance == doctest::Approx(3e-4));
  CHECK(r.pass);
  auto f = make_report("y", "a <= b", 2.0, 1.0);
  CHECK_FALSE(f.pass);
  auto v = make_report("z", "a <= b", 2.0, std::numeric_limits<double>::infinity());
  CHECK(v.vacuous);
  CHECK(v.pass);
  auto j = r.to_json();
  CHECK(j["slack"].get<double>() == doctest::Approx(1.0));
  CHECK_FALSE(j.contains("runtime"));
}

TEST_CASE("lsi on the line at closed-form inputs") {
  auto g = make_semicircle(1.0, 2000, Domain::real_line(-1.05, 1.05));
  auto r = verify_lsi_R(g, quadratic_potential(1.0), 1.0);
  CHECK(r.lhs == doctest::Approx(0.5 * std::log(4.0) + 1.0 / 8 - 0.5).epsilon(1e-4));
  CHECK(r.rhs == doctest::Approx(1.125).epsilon(1e-4));
  CHECK(r.pass);
  CHECK(r.b_source == "closed-form");
  auto eq = verify_lsi_R(make_semicircle(2.0, 2000), quadratic_potential(1.0), 1.0);
  CHECK(eq.lhs == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
  CHECK(eq.rhs == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
  CHECK(eq.pass);
}

TEST_CASE("hypothesis violations are rejected") {
  auto concave = custom_potential(DomainKind::RealLine, [](double x) { return -x * x; }, [](double x) { return -2 * x; },
                                  1.0, "concave");
  CHECK_THROWS_AS(require_convexity(concave, 1.0, -1.0, 1.0), DomainError);
  CHECK_NOTHROW(require_convexity(quadratic_potential(2.0), 2.0, -3.0, 3.0));
  CHECK_THROWS_AS(verify_lsi_R(make_semicircle(2.0, 400), quadratic_potential(1.0), 2.0), DomainError);
}

TEST_CASE("voiculescu equality at the semicircle") {
  auto r = verify_voiculescu(make_semicircle(2.0, 2000, Domain::real_line(-2.1, 2.1)));
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-4));
  CHECK(r.pass);
  auto u = verify_voiculescu(make_uniform(Domain::real_line(-1, 1), 2000));
  CHECK(u.slack > 1e-3);
}

TEST_CASE("circle lsi and tci closed forms") {
  auto q = cosine_potential(8.0);
  auto r = verify_lsi_T(make_nu_lambda(4.0, 2048), q, q.rho);
  double d = 0.25 - 0.125;
  CHECK(r.lhs == doctest::Approx(d * d).epsilon(1e-5));
  CHECK(r.rhs == doctest::Approx(2 * d * d * 8.0 / 4.0).epsilon(1e-5));
  auto zero = verify_lsi_T(make_nu_lambda(4.0, 2048), zero_circle_potential(), 0.0);
  CHECK(zero.lhs == doctest::Approx(1.0 / 16).epsilon(1e-5));
  CHECK(zero.pass);
  auto t = verify_tci_T(make_nu_lambda(4.0, 256), zero_circle_potential(), 0.0, true);
  REQUIRE(t.size() == 2);
  CHECK(t[0].rhs == doctest::Approx(std::sqrt(2.0 / 16)).epsilon(1e-4));
  CHECK(t[0].pass);
  CHECK(t[1].pass);
}

TEST_CASE("tci on the line at alpha = 4") {
  auto g = make_semicircle(1.0, 2000, Domain::real_line(-1.05, 1.05));
  auto r = verify_tci_R(g, quadratic_potential(1.0), 1.0);
  CHECK(r.lhs == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-4));
  CHECK(r.rhs == doctest::Approx(std::sqrt(0.5 * std::log(4.0) + 0.125 - 0.5)).epsilon(1e-4));
  CHECK(r.pass);
}

TEST_CASE("half-line reports") {
  auto r = verify_halfline(make_power_density(1.0, 2000), linear_halfline_potential(1.0), 1.0);
  REQUIRE(r.size() == 3);
  for (const auto& x : r) CHECK(x.pass);
  auto q = verify_halfline(make_marchenko_pastur(1.0, 2000, default_window(linear_halfline_potential(1.0)).b),
                           linear_halfline_potential(1.0), 1.0);
  CHECK(q[1].lhs == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
}

TEST_CASE("suites are deterministic and sorted") {
  auto a = run_suite("tci-r", 3, 400), b = run_suite("tci-r", 3, 400);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].to_json().dump() == b[i].to_json().dump());
  CHECK(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.id < y.id; }));
  auto s = summarize(a);
  REQUIRE(s.size() == 1);
  CHECK(s[0].failed == 0);
  CHECK(format_summary(s, false).find("tci-r") != std::string::npos);
  CHECK_THROWS(run_suite("nope", 1));
}
