#include "freeprob/potential.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "freeprob/special.hpp"

namespace freeprob {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::string, double> parse_kv(const std::string& body) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("potential spec: expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    double v;
    if (val == "inf" || val == "infinity") {
      v = kLambdaInfinity;
    } else {
      size_t used = 0;
      v = std::stod(val, &used);
      if (used != val.size()) throw DomainError("potential spec: bad number '" + val + "'");
    }
    out[key] = v;
  }
  return out;
}

double take(std::map<std::string, double>& kv, const std::string& key, double dflt, bool required) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (required) throw DomainError("potential spec: missing '" + key + "'");
    return dflt;
  }
  double v = it->second;
  kv.erase(it);
  return v;
}

}  // namespace

double PotentialSpec::second(double x) const {
  if (Qsecond) return Qsecond(x);
  double d = 1e-5 * std::max(1.0, std::abs(x));
  return (Qprime(x + d) - Qprime(x - d)) / (2.0 * d);
}

PotentialSpec quadratic_potential(double rho, double center) {
  if (!(rho > 0)) throw DomainError("quadratic potential needs rho > 0");
  PotentialSpec p;
  p.domain = DomainKind::RealLine;
  p.Q = [rho, center](double x) { return 0.5 * rho * (x - center) * (x - center); };
  p.Qprime = [rho, center](double x) { return rho * (x - center); };
  p.Qsecond = [rho](double) { return rho; };
  p.rho = rho;
  p.tag = ClosedFormTag::QuadraticR;
  p.param = rho;
  p.offset = center;
  p.label = "quadratic:rho=" + fmt_num(rho) + (center != 0.0 ? ",center=" + fmt_num(center) : "");
  return p;
}

PotentialSpec cosine_potential(double lambda, double phase) {
  PotentialSpec p;
  p.domain = DomainKind::Circle;
  p.tag = ClosedFormTag::CosineT;
  p.param = lambda;
  p.offset = phase;
  if (std::isinf(lambda)) {
    p.Q = [](double) { return 0.0; };
    p.Qprime = [](double) { return 0.0; };
    p.Qsecond = [](double) { return 0.0; };
    p.rho = 0.0;
    p.label = "cosine:lambda=inf";
    return p;
  }
  if (!(lambda > 0)) throw DomainError("cosine potential needs lambda > 0");
  double c = 2.0 / lambda;
  p.Q = [c, phase](double t) { return -c * std::cos(t - phase); };
  p.Qprime = [c, phase](double t) { return c * std::sin(t - phase); };
  p.Qsecond = [c, phase](double t) { return c * std::cos(t - phase); };
  p.rho = -c;
  p.label = "cosine:lambda=" + fmt_num(lambda) + (phase != 0.0 ? ",phase=" + fmt_num(phase) : "");
  return p;
}

PotentialSpec zero_circle_potential() { return cosine_potential(kLambdaInfinity); }

PotentialSpec linear_halfline_potential(double rho) {
  if (!(rho > 0)) throw DomainError("linear half-line potential needs rho > 0");
  PotentialSpec p;
  p.domain = DomainKind::HalfLine;
  p.Q = [rho](double x) { return rho * x; };
  p.Qprime = [rho](double) { return rho; };
  p.Qsecond = [](double) { return 0.0; };
  p.rho = rho;
  p.tag = ClosedFormTag::LinearHalfLine;
  p.param = rho;
  p.label = "linear-halfline:rho=" + fmt_num(rho);
  return p;
}

PotentialSpec custom_potential(DomainKind domain, std::function<double(double)> q, std::function<double(double)> dq,
                               double rho, std::string label, std::function<double(double)> d2q) {
  PotentialSpec p;
  p.domain = domain;
  p.Q = std::move(q);
  p.Qprime = std::move(dq);
  p.Qsecond = std::move(d2q);
  p.rho = rho;
  p.tag = ClosedFormTag::Custom;
  p.label = std::move(label);
  return p;
}

PotentialSpec tabulated_potential(DomainKind domain, std::vector<double> x, std::vector<double> q,
                                  std::vector<double> dq, double rho, std::string label) {
  if (x.size() < 2 || q.size() != x.size() || dq.size() != x.size())
    throw DomainError("tabulated potential needs matching columns with at least two rows");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("tabulated potential abscissae must increase");
  auto xs = std::make_shared<std::vector<double>>(std::move(x));
  auto interp = [xs](std::shared_ptr<std::vector<double>> ys) {
    return [xs, ys](double t) {
      const auto& X = *xs;
      const auto& Y = *ys;
      if (t <= X.front()) return Y.front() + (t - X.front()) * (Y[1] - Y[0]) / (X[1] - X[0]);
      if (t >= X.back()) {
        size_t n = X.size();
        return Y.back() + (t - X.back()) * (Y[n - 1] - Y[n - 2]) / (X[n - 1] - X[n - 2]);
      }
      size_t i = static_cast<size_t>(std::upper_bound(X.begin(), X.end(), t) - X.begin()) - 1;
      double f = (t - X[i]) / (X[i + 1] - X[i]);
      return Y[i] + f * (Y[i + 1] - Y[i]);
    };
  };
  return custom_potential(domain, interp(std::make_shared<std::vector<double>>(std::move(q))),
                          interp(std::make_shared<std::vector<double>>(std::move(dq))), rho, std::move(label));
}

PotentialSpec load_potential_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open potential file: " + path);
  std::string line;
  DomainKind domain = DomainKind::RealLine;
  double rho = 0.0;
  std::vector<double> x, q, dq;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("domain=");
      if (pos != std::string::npos) {
        std::string tag = line.substr(pos + 7);
        tag = tag.substr(0, tag.find_first_of(" ,\t"));
        domain = parse_domain_name(tag);
      }
      pos = line.find("rho=");
      if (pos != std::string::npos) rho = std::stod(line.substr(pos + 4));
      continue;
    }
    if (line[0] == 'x') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    if (c.empty()) throw DomainError("potential file rows need x,Q,dQ");
    x.push_back(std::stod(a));
    q.push_back(std::stod(b));
    dq.push_back(std::stod(c));
  }
  return tabulated_potential(domain, std::move(x), std::move(q), std::move(dq), rho, "file:" + path);
}

PotentialSpec mollify_potential(const PotentialSpec& q, double eps) {
  if (!(eps > 0)) throw DomainError("mollify_potential needs eps > 0");
  const auto& g = gauss_legendre(48);
  auto nodes = std::make_shared<std::vector<std::pair<double, double>>>();
  for (size_t k = 0; k < g.nodes.size(); ++k) {
    double y = g.nodes[k];
    nodes->push_back({eps * y, g.weights[k] * bump(y)});
  }
  double total = 0.0;
  for (auto& [y, w] : *nodes) total += w;
  for (auto& [y, w] : *nodes) w /= total;
  auto Q = q.Q;
  auto dQ = q.Qprime;
  PotentialSpec p = custom_potential(
      q.domain,
      [Q, nodes](double x) {
        double s = 0.0;
        for (auto& [y, w] : *nodes) s += w * Q(x - y);
        return s;
      },
      [dQ, nodes](double x) {
        double s = 0.0;
        for (auto& [y, w] : *nodes) s += w * dQ(x - y);
        return s;
      },
      q.rho, q.label + "*bump(" + fmt_num(eps) + ")");
  return p;
}

PotentialSpec symmetrized_potential(const PotentialSpec& q) {
  auto Q = q.Q;
  auto dQ = q.Qprime;
  auto d2Q = q.Qsecond;
  std::function<double(double)> second;
  if (d2Q) second = [dQ, d2Q](double x) { return dQ(x * x) + 2.0 * x * x * d2Q(x * x); };
  PotentialSpec p = custom_potential(
      DomainKind::RealLine, [Q](double x) { return 0.5 * Q(x * x); }, [dQ](double x) { return x * dQ(x * x); },
      q.tag == ClosedFormTag::LinearHalfLine ? q.param : 0.0, "sym(" + q.label + ")", second);
  if (q.tag == ClosedFormTag::LinearHalfLine) {
    p.tag = ClosedFormTag::QuadraticR;
    p.param = q.param;
  }
  return p;
}

PotentialSpec parse_potential(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "file") return load_potential_file(body);
  if (kind == "zero-circle") return zero_circle_potential();
  auto kv = parse_kv(body);
  PotentialSpec p;
  if (kind == "quadratic") {
    double rho = take(kv, "rho", 1.0, true);
    double c = take(kv, "center", 0.0, false);
    p = quadratic_potential(rho, c);
  } else if (kind == "cosine") {
    double lambda = take(kv, "lambda", 0.0, true);
    double phase = take(kv, "phase", 0.0, false);
    p = cosine_potential(lambda, phase);
  } else if (kind == "linear-halfline") {
    p = linear_halfline_potential(take(kv, "rho", 1.0, true));
  } else {
    throw DomainError("unknown potential kind: " + kind);
  }
  if (!kv.empty()) throw DomainError("potential spec: unknown key '" + kv.begin()->first + "'");
  return p;
}

double convexity_defect(const PotentialSpec& q, double rho, double a, double b, int points) {
  double d = (b - a) / (points - 1);
  auto f = [&](double x) { return q.Q(x) - 0.5 * rho * x * x; };
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < points; ++i) {
    double x = a + d * i;
    double sd = (f(x + d) - 2.0 * f(x) + f(x - d)) / (d * d);
    worst = std::min(worst, sd);
  }
  return worst;
}

Domain default_window(const PotentialSpec& q) {
  switch (q.domain) {
    case DomainKind::Circle: return Domain::circle();
    case DomainKind::HalfLine: {
      double s = q.rho > 0 ? 2.0 / std::sqrt(q.rho) + 1.0 : 4.0;
      return Domain::half_line(s * s);
    }
    case DomainKind::RealLine:
    default: {
      double w = q.rho > 0 ? 4.0 / std::sqrt(q.rho) + 1.0 : 6.0;
      double c = q.tag == ClosedFormTag::QuadraticR ? q.offset : 0.0;
      return Domain::real_line(c - w, c + w);
    }
  }
}

}  // namespace freeprob
