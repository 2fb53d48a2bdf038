#include "freeprob/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include <Eigen/Dense>

#include "freeprob/common.hpp"
#include "freeprob/special.hpp"

namespace freeprob {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool on_circle(const EnsembleSpec& s) {
  return s.kind == EnsembleKind::SpecialUnitary || s.kind == EnsembleKind::Unitary;
}

double chord_log(double s, double t) { return std::log(std::abs(2.0 * std::sin(0.5 * (s - t)))); }

void validate(const EnsembleSpec& spec) {
  if (spec.n < 2) throw DomainError("ensemble size must be at least 2");
  bool circle = on_circle(spec);
  if (circle != (spec.q.domain == DomainKind::Circle))
    throw DomainError("potential domain does not match the ensemble");
  if (spec.kind == EnsembleKind::Positive && spec.q.domain != DomainKind::HalfLine)
    throw DomainError("positive ensemble needs a half-line potential");
  if (spec.kind == EnsembleKind::Restricted && !(spec.R > 0.0))
    throw DomainError("restricted ensemble needs R > 0");
  if (!spec.q.Q) throw DomainError("potential has no values");
}

double potential_factor(const EnsembleSpec& spec) { return spec.orthogonal ? 0.5 * spec.n : spec.n; }
double vandermonde_factor(const EnsembleSpec& spec) { return spec.orthogonal ? 1.0 : 2.0; }

bool in_domain(const EnsembleSpec& spec, double x) {
  switch (spec.kind) {
    case EnsembleKind::Restricted: return x >= -spec.R && x <= spec.R;
    case EnsembleKind::Positive: return x >= 0.0;
    default: return std::isfinite(x);
  }
}

double reflect(const EnsembleSpec& spec, double y) {
  if (spec.kind == EnsembleKind::Positive) return std::abs(y);
  if (spec.kind == EnsembleKind::Restricted) {
    double R = spec.R;
    for (int guard = 0; guard < 64 && (y > R || y < -R); ++guard) y = y > R ? 2.0 * R - y : -2.0 * R - y;
    return std::clamp(y, -R, R);
  }
  return y;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Typical interparticle spacing, used for the initial step and the default layout.
std::pair<double, double> layout_interval(const EnsembleSpec& spec) {
  if (on_circle(spec)) return {-kPi, kPi};
  if (spec.kind == EnsembleKind::Restricted) return {-0.9 * spec.R, 0.9 * spec.R};
  Domain w = default_window(spec.q);
  if (spec.kind == EnsembleKind::Positive) return {0.0, 0.8 * w.b};
  double c = 0.5 * (w.a + w.b), h = 0.3 * (w.b - w.a);
  return {c - h, c + h};
}

std::vector<double> default_layout(const EnsembleSpec& spec) {
  auto [a, b] = layout_interval(spec);
  int n = spec.n;
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = a + (b - a) * (j + 0.5) / n;
  if (spec.kind == EnsembleKind::SpecialUnitary) x.pop_back();
  return x;
}

// Full angle vector with the determined last angle.
std::vector<double> complete_su(const std::vector<double>& free) {
  std::vector<double> th(free);
  double s = 0.0;
  for (double t : free) s += t;
  th.push_back(wrap_angle(-s));
  return th;
}

struct Chain {
  const EnsembleSpec& spec;
  std::vector<double> x;  // all n points (SU: last one determined)
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> unif{0.0, 1.0};
  double cq, cv;

  Chain(const EnsembleSpec& s, std::vector<double> start, std::uint64_t seed)
      : spec(s), rng(seed), cq(potential_factor(s)), cv(vandermonde_factor(s)) {
    x = spec.kind == EnsembleKind::SpecialUnitary ? complete_su(start) : std::move(start);
  }

  double interaction_line(int k, double y, int skip) const {
    double d = 0.0;
    for (int j = 0; j < static_cast<int>(x.size()); ++j) {
      if (j == k || j == skip) continue;
      double a = std::abs(y - x[j]), b = std::abs(x[k] - x[j]);
      if (a == 0.0) return kNegInf;
      d += std::log(a / b);
    }
    return d;
  }

  double interaction_circle(int k, double y, int skip) const {
    double d = 0.0;
    for (int j = 0; j < static_cast<int>(x.size()); ++j) {
      if (j == k || j == skip) continue;
      double a = chord_log(y, x[j]);
      if (!std::isfinite(a)) return kNegInf;
      d += a - chord_log(x[k], x[j]);
    }
    return d;
  }

  // One coordinate proposal; returns true on acceptance.
  bool step_once(int k, double step) {
    double delta = step * normal(rng);
    double logratio;
    double y = 0.0, z = 0.0;
    int last = static_cast<int>(x.size()) - 1;
    if (spec.kind == EnsembleKind::SpecialUnitary) {
      y = wrap_angle(x[k] + delta);
      z = wrap_angle(x[last] - delta);
      double dq = spec.q.Q(y) + spec.q.Q(z) - spec.q.Q(x[k]) - spec.q.Q(x[last]);
      double di = interaction_circle(k, y, last) + interaction_circle(last, z, k);
      double pair_new = chord_log(y, z);
      if (!std::isfinite(pair_new) || !std::isfinite(di)) return false;
      di += pair_new - chord_log(x[k], x[last]);
      logratio = -cq * dq + cv * di;
    } else if (spec.kind == EnsembleKind::Unitary) {
      y = wrap_angle(x[k] + delta);
      double di = interaction_circle(k, y, -1);
      if (!std::isfinite(di)) return false;
      logratio = -cq * (spec.q.Q(y) - spec.q.Q(x[k])) + cv * di;
    } else {
      y = reflect(spec, x[k] + delta);
      if (!in_domain(spec, y)) return false;
      double di = interaction_line(k, y, -1);
      if (!std::isfinite(di)) return false;
      logratio = -cq * (spec.q.Q(y) - spec.q.Q(x[k])) + cv * di;
    }
    if (!(logratio >= 0.0) && !(std::log(unif(rng)) < logratio)) return false;
    x[k] = y;
    if (spec.kind == EnsembleKind::SpecialUnitary) x[last] = z;
    return true;
  }

  int movable() const {
    return spec.kind == EnsembleKind::SpecialUnitary ? static_cast<int>(x.size()) - 1 : static_cast<int>(x.size());
  }

  EmpiricalMeasure snapshot() const {
    Domain d = on_circle(spec) ? Domain::circle()
               : spec.kind == EnsembleKind::Positive   ? Domain::half_line(std::max(1.0, *std::max_element(x.begin(), x.end())))
                                                       : Domain::real_line(*std::min_element(x.begin(), x.end()),
                                                                           *std::max_element(x.begin(), x.end()));
    return EmpiricalMeasure(d, x);
  }
};

struct ChainOutput {
  std::vector<EmpiricalMeasure> samples;
  ChainDiagnostics diag;
};

ChainOutput run_chain(const EnsembleSpec& spec, const SampleOptions& opt, std::uint64_t seed) {
  std::vector<double> start;
  if (opt.init_target)
    start = quantile_init(spec, *opt.init_target).positions;
  else
    start = default_layout(spec);
  if (!std::isfinite(log_joint_density(spec, start))) throw NumericalError("initial configuration has zero density");
  Chain c(spec, start, seed);
  auto [a, b] = layout_interval(spec);
  double step = 0.5 * (b - a) / spec.n;
  ChainOutput out;
  long acc = 0, prop = 0, win_acc = 0, win_prop = 0;
  const int m = c.movable();
  for (int s = 0; s < opt.burn_in; ++s) {
    for (int k = 0; k < m; ++k) {
      bool ok = c.step_once(k, step);
      acc += ok;
      win_acc += ok;
      ++prop;
      ++win_prop;
    }
    if ((s + 1) % 50 == 0) {
      double rate = static_cast<double>(win_acc) / static_cast<double>(win_prop);
      if (rate >= 0.2 && rate <= 0.5) {
        if (out.diag.tuned_at < 0) out.diag.tuned_at = s + 1;
      } else {
        step *= std::clamp(rate / 0.35, 0.25, 2.0);
        if (on_circle(spec)) step = std::min(step, kPi);
      }
      win_acc = win_prop = 0;
    }
  }
  if (opt.burn_in > 0 && acc == 0) throw NumericalError("sampler stalled during burn-in");
  out.diag.burn_acceptance = prop ? static_cast<double>(acc) / prop : 0.0;
  acc = prop = 0;
  int thin = std::max(1, opt.thin);
  for (int s = 0; s < opt.sweeps; ++s) {
    for (int k = 0; k < m; ++k) {
      acc += c.step_once(k, step);
      ++prop;
    }
    if ((s + 1) % thin == 0) out.samples.push_back(c.snapshot());
  }
  if (opt.sweeps > 0 && acc == 0) throw NumericalError("sampler stalled");
  out.diag.acceptance = prop ? static_cast<double>(acc) / prop : 0.0;
  out.diag.step = step;
  out.diag.samples = static_cast<long>(out.samples.size());
  return out;
}

// Composite Gauss-Legendre nodes on [a, b].
void composite_rule(double a, double b, int panels, int order, std::vector<double>& x, std::vector<double>& w) {
  const auto& g = gauss_legendre(order);
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + h * (p + 0.5);
    for (int i = 0; i < order; ++i) {
      x.push_back(c + 0.5 * h * g.nodes[i]);
      w.push_back(0.5 * h * g.weights[i]);
    }
  }
}

std::pair<double, double> brute_window(const EnsembleSpec& spec, double& qmin) {
  if (spec.kind == EnsembleKind::Restricted) {
    qmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) qmin = std::min(qmin, spec.q.Q(-spec.R + 2.0 * spec.R * i / 4000.0));
    return {-spec.R, spec.R};
  }
  Domain w = default_window(spec.q);
  double lo = w.a, hi = w.b;
  auto scan_min = [&](double a, double b) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) m = std::min(m, spec.q.Q(a + (b - a) * i / 4000.0));
    return m;
  };
  qmin = scan_min(lo, hi);
  const double n = spec.n, cq = potential_factor(spec);
  auto enough = [&](double e, double c) {
    double v = spec.q.Q(e);
    return cq * (v - qmin) >= 46.0 + 2.0 * (n - 1.0) * std::log(1.0 + std::abs(e - c));
  };
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    bool ok_hi = enough(hi, c);
    bool ok_lo = spec.kind == EnsembleKind::Positive || enough(lo, c);
    if (ok_hi && ok_lo) break;
    if (!ok_hi) hi = c + 1.25 * (hi - c);
    if (!ok_lo) lo = c - 1.25 * (c - lo);
    qmin = std::min(qmin, scan_min(lo, hi));
  }
  if (spec.kind == EnsembleKind::Positive) lo = 0.0;
  return {lo, hi};
}

}  // namespace

std::string ensemble_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::SelfAdjoint: return "self-adjoint";
    case EnsembleKind::Restricted: return "restricted";
    case EnsembleKind::SpecialUnitary: return "su";
    case EnsembleKind::Unitary: return "u";
    case EnsembleKind::Positive: return "positive";
  }
  return "?";
}

EnsembleKind parse_ensemble_kind(const std::string& s, double* R) {
  if (s == "self-adjoint" || s == "gue") return EnsembleKind::SelfAdjoint;
  if (s == "su") return EnsembleKind::SpecialUnitary;
  if (s == "u") return EnsembleKind::Unitary;
  if (s == "positive") return EnsembleKind::Positive;
  if (s.rfind("restricted", 0) == 0) {
    auto pos = s.find("R=");
    if (pos == std::string::npos) throw DomainError("restricted ensemble needs R=<value>");
    double r = std::stod(s.substr(pos + 2));
    if (!(r > 0.0)) throw DomainError("restricted ensemble needs R > 0");
    if (R) *R = r;
    return EnsembleKind::Restricted;
  }
  throw DomainError("unknown ensemble: " + s);
}

double log_joint_density(const EnsembleSpec& spec, const std::vector<double>& positions) {
  validate(spec);
  const bool su = spec.kind == EnsembleKind::SpecialUnitary, circle = on_circle(spec);
  size_t expected = su ? spec.n - 1 : spec.n;
  if (positions.size() != expected) throw DomainError("wrong number of coordinates");
  std::vector<double> x = su ? complete_su(positions) : positions;
  const double cq = potential_factor(spec), cv = vandermonde_factor(spec);
  double s = 0.0;
  for (double xi : x) {
    if (!circle && !in_domain(spec, xi)) return kNegInf;
    s -= cq * spec.q.Q(xi);
  }
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j) {
      double l = circle ? chord_log(x[i], x[j]) : std::log(std::abs(x[i] - x[j]));
      if (!std::isfinite(l)) return kNegInf;
      s += cv * l;
    }
  return s;
}

std::vector<double> all_points(const EnsembleSpec& spec, const std::vector<double>& positions) {
  std::vector<double> x = spec.kind == EnsembleKind::SpecialUnitary ? complete_su(positions) : positions;
  if (on_circle(spec))
    for (double& t : x) t = wrap_angle(t);
  std::sort(x.begin(), x.end());
  return x;
}

double metropolis_accept_ratio(const EnsembleSpec& spec, const std::vector<double>& x, const std::vector<double>& y) {
  double lx = log_joint_density(spec, x), ly = log_joint_density(spec, y);
  if (!std::isfinite(ly)) return 0.0;
  if (!std::isfinite(lx)) return 1.0;
  return std::min(1.0, std::exp(ly - lx));
}

ChainState quantile_init(const EnsembleSpec& spec, const GridMeasure& target) {
  validate(spec);
  QuantileTable qt = cdf_quantile(target);
  const int n = spec.n;
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = qt.quantile((j + 0.5) / n);
  for (int j = 1; j < n; ++j)
    if (x[j] <= x[j - 1]) x[j] = std::nextafter(x[j - 1], std::numeric_limits<double>::infinity()) + 1e-9;
  if (spec.kind == EnsembleKind::Restricted)
    for (double& v : x) v = std::clamp(v, -spec.R, spec.R);
  if (spec.kind == EnsembleKind::SpecialUnitary) x.pop_back();
  ChainState st;
  st.positions = x;
  st.log_density = log_joint_density(spec, x);
  return st;
}

std::uint64_t chain_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

int worker_count() {
  if (const char* env = std::getenv("FREEPROB_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h ? static_cast<int>(h) : 1;
}

SampleResult sample(const EnsembleSpec& spec, const SampleOptions& opt) {
  validate(spec);
  if (opt.chains < 1 || opt.sweeps < 0 || opt.burn_in < 0) throw DomainError("invalid sampling options");
  std::vector<ChainOutput> outs(opt.chains);
  std::vector<std::exception_ptr> errors(opt.chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < opt.chains; c = next++) {
      try {
        outs[c] = run_chain(spec, opt, chain_seed(opt.seed, c));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  int workers = std::min(worker_count(), opt.chains);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  SampleResult r;
  for (auto& o : outs) {
    for (auto& s : o.samples) r.samples.push_back(std::move(s));
    r.chains.push_back(o.diag);
  }
  return r;
}

EmpiricalMeasure gue_direct(int n, double rho, std::mt19937_64& rng) {
  if (n < 1 || !(rho > 0.0)) throw DomainError("gue_direct needs n >= 1 and rho > 0");
  std::normal_distribution<double> g(0.0, 1.0);
  const double sd_diag = 1.0 / std::sqrt(n * rho), sd_off = 1.0 / std::sqrt(2.0 * n * rho);
  Eigen::MatrixXcd H(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = sd_diag * g(rng);
    for (int j = i + 1; j < n; ++j) {
      std::complex<double> z(sd_off * g(rng), sd_off * g(rng));
      H(i, j) = z;
      H(j, i) = std::conj(z);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return EmpiricalMeasure(Domain::real_line(ev.front(), ev.back()), ev);
}

BruteResult brute_normalizer(const EnsembleSpec& spec, const std::vector<std::function<double(double)>>& observables) {
  validate(spec);
  const int n = spec.n;
  if (n > 3) throw Unsupported("brute-force normalizer supports n <= 3");
  const double cq = potential_factor(spec), cv = vandermonde_factor(spec);
  const size_t nobs = observables.size();
  BruteResult res;
  res.means.assign(nobs, 0.0);

  if (on_circle(spec)) {
    // Trapezoid rule on the grid theta_i = -pi + 2 pi i/M; the determined SU angle stays on the grid.
    const bool su = spec.kind == EnsembleKind::SpecialUnitary;
    const int M = su || n == 2 ? 512 : 128;
    std::vector<double> qv(M), lg(M);
    std::vector<std::vector<double>> fv(nobs, std::vector<double>(M));
    for (int i = 0; i < M; ++i) {
      double t = -kPi + kTwoPi * i / M;
      qv[i] = spec.q.Q(t);
      lg[i] = i == 0 ? kNegInf : cv * std::log(std::abs(2.0 * std::sin(kPi * i / M)));
      for (size_t o = 0; o < nobs; ++o) fv[o][i] = observables[o](t);
    }
    double qmin = *std::min_element(qv.begin(), qv.end());
    auto pair = [&](int a, int b) { return lg[((a - b) % M + M) % M]; };
    double z = 0.0;
    std::vector<double> acc(nobs, 0.0);
    auto add_point = [&](const std::vector<int>& idx, double weight) {
      double lw = 0.0;
      for (int a : idx) lw -= cq * (qv[a] - qmin);
      for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = i + 1; j < idx.size(); ++j) lw += pair(idx[i], idx[j]);
      if (!std::isfinite(lw)) return;
      double v = weight * std::exp(lw);
      z += v;
      for (size_t o = 0; o < nobs; ++o) {
        double m = 0.0;
        for (int a : idx) m += fv[o][a];
        acc[o] += v * m / n;
      }
    };
    auto last = [&](int s) { return ((n * M / 2 - s) % M + M) % M; };
    const double w2 = 1.0 / (double(M) * M);
    if (su && n == 2) {
      for (int i = 0; i < M; ++i) add_point({i, last(i)}, 1.0 / M);
    } else if (su || n == 2) {
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) add_point(su ? std::vector<int>{i, j, last(i + j)} : std::vector<int>{i, j}, w2);
    } else {
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
          for (int k = 0; k < M; ++k) add_point({i, j, k}, w2 / M);
    }
    res.log_z = std::log(z) - cq * n * qmin;
    for (size_t o = 0; o < nobs; ++o) res.means[o] = acc[o] / z;
    return res;
  }

  double qmin = 0.0;
  auto [lo, hi] = brute_window(spec, qmin);
  std::vector<double> x, w;
  int panels = n == 2 ? 64 : 24;
  composite_rule(lo, hi, panels, 12, x, w);
  const size_t K = x.size();
  std::vector<double> a(K);
  for (size_t i = 0; i < K; ++i) a[i] = w[i] * std::exp(-cq * (spec.q.Q(x[i]) - qmin));
  std::vector<std::vector<double>> fv(nobs, std::vector<double>(K));
  for (size_t o = 0; o < nobs; ++o)
    for (size_t i = 0; i < K; ++i) fv[o][i] = observables[o](x[i]);
  auto vd = [&](double u, double v) {
    double d = std::abs(u - v);
    return cv == 2.0 ? d * d : d;
  };
  double z = 0.0;
  std::vector<double> acc(nobs, 0.0);
  if (n == 2) {
    for (size_t i = 0; i < K; ++i)
      for (size_t j = 0; j < K; ++j) {
        double v = a[i] * a[j] * vd(x[i], x[j]);
        z += v;
        for (size_t o = 0; o < nobs; ++o) acc[o] += v * fv[o][i];
      }
  } else {
    for (size_t i = 0; i < K; ++i)
      for (size_t j = 0; j < K; ++j) {
        double vij = a[i] * a[j] * vd(x[i], x[j]);
        if (vij == 0.0) continue;
        double s = 0.0;
        for (size_t k = 0; k < K; ++k) s += a[k] * vd(x[i], x[k]) * vd(x[j], x[k]);
        double v = vij * s;
        z += v;
        for (size_t o = 0; o < nobs; ++o) acc[o] += v * fv[o][i];
      }
  }
  res.log_z = std::log(z) - cq * n * qmin;
  for (size_t o = 0; o < nobs; ++o) res.means[o] = acc[o] / z;
  return res;
}

GridMeasure mean_eigenvalue_distribution(const std::vector<EmpiricalMeasure>& samples, const Domain& domain,
                                         size_t cells) {
  if (samples.empty()) throw DomainError("no samples");
  std::vector<double> m(cells, 0.0);
  double h = domain.length() / static_cast<double>(cells);
  double total = 0.0;
  for (const auto& s : samples)
    for (double x : s.atoms) {
      double u = domain.kind == DomainKind::Circle ? wrap_angle(x) : x;
      long i = static_cast<long>(std::floor((u - domain.a) / h));
      i = std::clamp(i, 0L, static_cast<long>(cells) - 1);
      m[i] += 1.0;
      total += 1.0;
    }
  for (double& v : m) v /= total;
  return GridMeasure::from_masses(domain, m);
}

EmpiricalMeasure pooled(const std::vector<EmpiricalMeasure>& samples) {
  if (samples.empty()) throw DomainError("no samples");
  std::vector<double> all;
  for (const auto& s : samples) all.insert(all.end(), s.atoms.begin(), s.atoms.end());
  std::sort(all.begin(), all.end());
  Domain d = samples.front().domain;
  if (d.kind == DomainKind::RealLine) d = Domain::real_line(all.front(), all.back());
  return EmpiricalMeasure(d, all);
}

}  // namespace freeprob
