#include "freeprob/special.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

#include "freeprob/common.hpp"

namespace freeprob {

namespace {

constexpr double kZeta3 = 1.2020569031595942854;

GaussRule build_gauss(int m) {
  GaussRule r;
  r.nodes.assign(m, 0.0);
  r.weights.assign(m, 0.0);
  if (m == 1) {
    r.weights[0] = 2.0;
    return r;
  }
  auto legendre = [m](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < m / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) {
    double dp = 0.0;
    legendre(0.0, dp);
    r.weights[m / 2] = 2.0 / (dp * dp);
  }
  return r;
}

struct ClausenCoefficients {
  std::vector<double> c2, c3;
  ClausenCoefficients() {
    for (int n = 1; n <= 40; ++n) {
      double base = 2.0 * riemann_zeta_even(2 * n) / std::pow(kTwoPi, 2 * n) / (2.0 * n);
      c2.push_back(base / (2.0 * n + 1.0));
      c3.push_back(base / ((2.0 * n + 1.0) * (2.0 * n + 2.0)));
    }
  }
};

const ClausenCoefficients& clausen_coefficients() {
  static const ClausenCoefficients c;
  return c;
}

double reduce_pi(double t) {
  double r = std::remainder(t, kTwoPi);
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, build_gauss(m)).first;
  return it->second;
}

double riemann_zeta_even(int two_n) {
  if (two_n == 2) return kPi * kPi / 6.0;
  if (two_n == 4) return std::pow(kPi, 4) / 90.0;
  double s = 0.0;
  for (int k = 2000; k >= 1; --k) s += std::pow(static_cast<double>(k), -two_n);
  return s;
}

double clausen2(double t) {
  double x = reduce_pi(t);
  if (x == 0.0) return 0.0;
  const auto& c = clausen_coefficients().c2;
  double x2 = x * x;
  double pw = x * x2;
  double s = x - x * std::log(std::abs(x));
  for (double cn : c) {
    double term = cn * pw;
    s += term;
    if (std::abs(term) < 1e-18) break;
    pw *= x2;
  }
  return s;
}

double clausen3(double t) {
  double x = reduce_pi(t);
  if (x == 0.0) return kZeta3;
  const auto& c = clausen_coefficients().c3;
  double x2 = x * x;
  double pw = x2 * x2;
  double s = kZeta3 + 0.5 * x2 * std::log(std::abs(x)) - 0.75 * x2;
  for (double cn : c) {
    double term = cn * pw;
    s -= term;
    if (std::abs(term) < 1e-19) break;
    pw *= x2;
  }
  return s;
}

double log_int1(double u) {
  if (u == 0.0) return 0.0;
  return u * std::log(std::abs(u)) - u;
}

double log_int2(double u) {
  if (u == 0.0) return 0.0;
  return 0.5 * u * u * std::log(std::abs(u)) - 0.75 * u * u;
}

double log_cell_pair(double a1, double b1, double a2, double b2) {
  return log_int2(b1 - a2) - log_int2(a1 - a2) - log_int2(b1 - b2) + log_int2(a1 - b2);
}

double logsin_cell_pair(double a1, double b1, double a2, double b2) {
  return clausen3(b1 - a2) + clausen3(a1 - b2) - clausen3(b1 - b2) - clausen3(a1 - a2);
}

double unit_cell_log_average(long k) {
  if (k < 0) k = -k;
  if (k == 0) return -1.5;
  if (k <= 16) {
    double kk = static_cast<double>(k);
    return log_int2(kk + 1) - 2.0 * log_int2(kk) + log_int2(kk - 1);
  }
  double kk = static_cast<double>(k);
  double inv2 = 1.0 / (kk * kk);
  double pw = inv2;
  double s = std::log(kk);
  for (int j = 1; j < 30; ++j) {
    double term = pw / (j * (2.0 * j + 1.0) * (2.0 * j + 2.0));
    s -= term;
    if (term < 1e-18) break;
    pw *= inv2;
  }
  return s;
}

double bump_normalizer() {
  static const double z = [] {
    const auto& g = gauss_legendre(24);
    const int panels = 64;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
      double a = -1.0 + 2.0 * p / panels, b = a + 2.0 / panels;
      for (size_t i = 0; i < g.nodes.size(); ++i) {
        double x = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i];
        s += 0.5 * (b - a) * g.weights[i] * std::exp(-1.0 / (1.0 - x * x));
      }
    }
    return s;
  }();
  return z;
}

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x)) / bump_normalizer();
}

std::string Extended::str() const {
  if (infinite) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace freeprob
