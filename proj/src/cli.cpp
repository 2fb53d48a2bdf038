#include "freeprob/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <unistd.h>

#include "freeprob/common.hpp"
#include "freeprob/equilibrium.hpp"
#include "freeprob/functionals.hpp"
#include "freeprob/harness.hpp"
#include "freeprob/potential.hpp"
#include "freeprob/sampler.hpp"
#include "freeprob/singular.hpp"
#include "freeprob/transport.hpp"

namespace freeprob {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::map<std::string, double> parse_params(const std::string& body, const std::vector<std::string>& allowed) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("expected key=value in '" + item + "'");
    std::string key = item.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw DomainError("unknown parameter '" + key + "'");
    size_t used = 0;
    double v = std::stod(item.substr(eq + 1), &used);
    if (used != item.size() - eq - 1) throw DomainError("bad number in '" + item + "'");
    out[key] = v;
  }
  return out;
}

double need(const std::map<std::string, double>& p, const std::string& k) {
  auto it = p.find(k);
  if (it == p.end()) throw DomainError("missing parameter '" + k + "'");
  return it->second;
}

double get_or(const std::map<std::string, double>& p, const std::string& k, double d) {
  auto it = p.find(k);
  return it == p.end() ? d : it->second;
}

std::string csv_of(const GridMeasure& mu, const std::vector<double>* transform = nullptr) {
  std::ostringstream os;
  write_measure_csv(os, mu, transform);
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GridMeasure parse_measure(const std::string& spec, size_t cells) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "semicircle") {
    auto p = parse_params(body, {"r", "center"});
    double r = need(p, "r"), c = get_or(p, "center", 0.0);
    return make_semicircle(r, cells, Domain::real_line(c - r, c + r), c);
  }
  if (kind == "nu") {
    auto p = parse_params(body, {"lambda", "phase"});
    return make_nu_lambda(need(p, "lambda"), cells, get_or(p, "phase", 0.0));
  }
  if (kind == "power") return make_power_density(need(parse_params(body, {"alpha"}), "alpha"), cells);
  if (kind == "uniform") {
    auto p = parse_params(body, {"a", "b"});
    return make_uniform(Domain::real_line(get_or(p, "a", -1.0), get_or(p, "b", 1.0)), cells);
  }
  if (kind == "uniform-circle") return make_uniform(Domain::circle(), cells);
  if (kind == "quarter-circle") return make_quarter_circle(need(parse_params(body, {"r"}), "r"), cells);
  if (kind == "marchenko-pastur") return make_marchenko_pastur(need(parse_params(body, {"rho"}), "rho"), cells);
  if (kind == "spike") {
    auto p = parse_params(body, {"k", "n"});
    int k = static_cast<int>(need(p, "k")), n = static_cast<int>(need(p, "n"));
    size_t per = std::max<size_t>(2, cells / static_cast<size_t>(k * n));
    return make_spike_measure(k, n, per);
  }
  if (colon == std::string::npos || spec.find(".csv") != std::string::npos) return load_measure_csv(spec);
  throw DomainError("unknown measure spec: " + spec);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> export_plot_data(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DomainError("report directory does not exist: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<fs::path> written;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::ostringstream os;
    os << "id,suite,inequality,lhs,rhs,slack,tolerance,pass,vacuous,b_source,seed,digest\n";
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json j = Json::parse(line);
      auto numstr = [](const Json& v) { return v.is_number() ? format_double(v.get<double>()) : v.get<std::string>(); };
      std::string ineq = j.at("inequality").get<std::string>();
      std::string digest = j.at("inputs").contains("digest") ? j["inputs"]["digest"].get<std::string>() : "";
      os << j.at("id").get<std::string>() << ',' << j.at("suite").get<std::string>() << ",\"" << ineq << "\","
         << numstr(j.at("lhs")) << ',' << numstr(j.at("rhs")) << ',' << numstr(j.at("slack")) << ','
         << numstr(j.at("tolerance")) << ',' << (j.at("pass").get<bool>() ? 1 : 0) << ','
         << (j.at("vacuous").get<bool>() ? 1 : 0) << ',' << j.at("b_source").get<std::string>() << ','
         << j.at("seed").get<std::uint64_t>() << ',' << digest << '\n';
    }
    fs::path out = f;
    out.replace_extension(".csv");
    write_file_atomic(out, os.str());
    written.push_back(out);
  }
  return written;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free entropy, free Fisher information and Coulomb gas toolkit", "freeprob"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "RunConfig file (TOML or INI); unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);

  size_t cells = 2000;
  std::uint64_t seed = 7;
  std::string out_dir;
  std::string measure_spec, potential_spec, functional_name, b_value = "auto";
  std::string domain_tag, ensemble_spec = "self-adjoint", method = "fft", mu_spec, nu_spec, metric = "line";
  std::string suite = "all", report_dir;
  int n = 8, sweeps = 1000, burn_in = 500, chains = 1, thin = 1;

  auto* functional = app.add_subcommand("functional", "Evaluate a free functional of a measure");
  functional->add_option("--measure", measure_spec, "Measure CSV or inline spec")->required();
  functional->add_option("--functional", functional_name,
                         "sigma, chi, energy, sigma-tilde, phi, phi-q, F, F-q, fisher, phi-plus, phi-plus-q, "
                         "sigma-tilde-plus")
      ->required();
  functional->add_option("--potential", potential_spec, "Potential spec");
  functional->add_option("--B", b_value, "Normalization constant or 'auto'");
  functional->add_option("--cells", cells, "Grid cells for inline measures");
  functional->add_option("--out", out_dir, "Also write functional.jsonl here");

  auto* equilibrium_cmd = app.add_subcommand("equilibrium", "Solve for the equilibrium measure and B(Q)");
  equilibrium_cmd->add_option("--potential", potential_spec, "Potential spec")->required();
  equilibrium_cmd->add_option("--domain", domain_tag, "real, circle or halfline (checked against the potential)");
  equilibrium_cmd->add_option("--cells", cells, "Grid cells");
  equilibrium_cmd->add_option("--out", out_dir, "Output directory")->default_val(".");

  auto* sample_cmd = app.add_subcommand("sample", "Sample a Coulomb gas ensemble");
  sample_cmd->add_option("--ensemble", ensemble_spec, "self-adjoint, restricted:R=.., su, u, positive");
  sample_cmd->add_option("--potential", potential_spec, "Potential spec")->required();
  sample_cmd->add_option("--n", n, "Matrix size")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--sweeps", sweeps, "Recorded sweeps per chain")->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--burn-in", burn_in, "Burn-in sweeps per chain")->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--chains", chains, "Independent chains")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--thin", thin, "Record every k-th sweep")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed, "Master seed");
  sample_cmd->add_option("--out", out_dir, "Output directory")->default_val(".");

  auto* hilbert_cmd = app.add_subcommand("hilbert", "Hilbert transform of a measure density");
  hilbert_cmd->add_option("--measure", measure_spec, "Measure CSV or inline spec")->required();
  hilbert_cmd->add_option("--method", method, "fft or pv")->check(CLI::IsMember({"fft", "pv"}));
  hilbert_cmd->add_option("--cells", cells, "Grid cells for inline measures");
  hilbert_cmd->add_option("--out", out_dir, "Output directory")->default_val(".");

  auto* energy_cmd = app.add_subcommand("energy", "Logarithmic potential and free entropy of a measure");
  energy_cmd->add_option("--measure", measure_spec, "Measure CSV or inline spec")->required();
  energy_cmd->add_option("--cells", cells, "Grid cells for inline measures");
  energy_cmd->add_option("--out", out_dir, "Output directory")->default_val(".");

  auto* transport_cmd = app.add_subcommand("transport", "Quadratic Wasserstein distance between two measures");
  transport_cmd->add_option("--mu", mu_spec, "First measure")->required();
  transport_cmd->add_option("--nu", nu_spec, "Second measure")->required();
  transport_cmd->add_option("--metric", metric, "line, geodesic or chord")->check(CLI::IsMember({"line", "geodesic", "chord"}));
  transport_cmd->add_option("--cells", cells, "Grid cells for inline measures");

  auto* verify_cmd = app.add_subcommand("verify", "Run the inequality verification suites");
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify_cmd->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suites));
  verify_cmd->add_option("--seed", seed, "Master seed");
  verify_cmd->add_option("--cells", cells, "Grid cells")->check(CLI::Range(64, 100000));
  verify_cmd->add_option("--out", out_dir, "Report directory")->default_val("verify-out");

  auto* report_cmd = app.add_subcommand("report", "Export plot-ready CSVs from a report directory");
  report_cmd->alias("export");
  report_cmd->add_option("--dir", report_dir, "Report directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::string config = app.config_to_str(true, false);
  err << "# resolved configuration\n" << config;

  try {
    if (*functional) {
      GridMeasure mu = parse_measure(measure_spec, cells);
      std::optional<PotentialSpec> q;
      if (!potential_spec.empty()) q = parse_potential(potential_spec);
      double B = 0.0;
      std::string b_source = "none";
      if (q) {
        if (b_value == "auto") {
          auto e = equilibrium(*q, mu.cells());
          B = e.B;
          b_source = e.source;
        } else {
          B = std::stod(b_value);
          b_source = "user";
        }
      }
      FunctionalValue v = evaluate_functional(functional_name, mu, q ? &*q : nullptr, B);
      Json j{{"name", v.name},
             {"value", v.value.infinite ? Json("inf") : Json(v.value.value)},
             {"inputs", {{"measure", measure_spec}, {"digest", v.digest}, {"potential", potential_spec}, {"B", B}, {"b_source", b_source}}}};
      out << j.dump() << "\n";
      if (!out_dir.empty()) write_file_atomic(fs::path(out_dir) / "functional.jsonl", j.dump() + "\n");
      return kExitOk;
    }
    if (*equilibrium_cmd) {
      PotentialSpec q = parse_potential(potential_spec);
      if (!domain_tag.empty() && parse_domain_name(domain_tag) != q.domain)
        throw DomainError("--domain does not match the potential's domain");
      auto e = equilibrium(q, cells);
      fs::path dir(out_dir);
      write_file_atomic(dir / "equilibrium.csv", csv_of(e.mu_Q));
      Json side{{"B", e.B}, {"residual", e.residual}, {"iterations", e.iterations}, {"converged", e.converged},
                {"source", e.source}, {"potential", potential_spec}, {"cells", cells}, {"run_config", config}};
      write_file_atomic(dir / "equilibrium.json", side.dump(2) + "\n");
      out << side.dump() << "\n";
      return kExitOk;
    }
    if (*sample_cmd) {
      EnsembleSpec s;
      s.kind = parse_ensemble_kind(ensemble_spec, &s.R);
      s.q = parse_potential(potential_spec);
      s.n = n;
      SampleOptions opt;
      opt.sweeps = sweeps;
      opt.burn_in = burn_in;
      opt.chains = chains;
      opt.thin = thin;
      opt.seed = seed;
      auto t0 = std::chrono::steady_clock::now();
      SampleResult r = sample(s, opt);
      double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      fs::path dir = fs::path(out_dir) / "samples";
      for (size_t i = 0; i < r.samples.size(); ++i) {
        std::ostringstream os;
        os << "eigenvalue\n";
        for (double x : r.samples[i].atoms) os << format_double(x) << "\n";
        char name[32];
        std::snprintf(name, sizeof name, "sample_%06zu.csv", i);
        write_file_atomic(dir / name, os.str());
      }
      Json diag = Json::array();
      for (const auto& c : r.chains)
        diag.push_back({{"acceptance", c.acceptance}, {"burn_acceptance", c.burn_acceptance}, {"step", c.step},
                        {"samples", c.samples}, {"tuned_at", c.tuned_at}});
      Json side{{"ensemble", ensemble_name(s.kind)}, {"n", n}, {"potential", potential_spec}, {"seed", seed},
                {"chains", diag}, {"samples", r.samples.size()}, {"run_config", config}};
      write_file_atomic(fs::path(out_dir) / "diagnostics.json", side.dump(2) + "\n");
      out << "wrote " << r.samples.size() << " samples in " << dt << " s\n";
      return kExitOk;
    }
    if (*hilbert_cmd) {
      GridMeasure mu = parse_measure(measure_spec, cells);
      HilbertResult h;
      switch (mu.domain().kind) {
        case DomainKind::RealLine: h = method == "pv" ? hilbert_R_pv(mu) : hilbert_R(mu); break;
        case DomainKind::Circle: h = method == "pv" ? hilbert_T_pv(mu) : hilbert_T(mu); break;
        case DomainKind::HalfLine: h = method == "pv" ? hilbert_halfline_direct(mu) : hilbert_halfline(mu); break;
      }
      write_file_atomic(fs::path(out_dir) / "hilbert.csv", csv_of(mu, &h.values));
      std::string convention = h.convention == HilbertConvention::LineUnnormalized
                                   ? "p.v. int p(t)/(x-t) dt"
                                   : "p.v. int p(t) cot((theta-t)/2) dt/2pi";
      out << Json{{"convention", convention}, {"method", method}, {"cells", mu.cells()}, {"digest", mu.digest()}}.dump()
          << "\n";
      return kExitOk;
    }
    if (*energy_cmd) {
      GridMeasure mu = parse_measure(measure_spec, cells);
      LogPotential lp(mu);
      std::vector<double> v = lp.at_midpoints();
      write_file_atomic(fs::path(out_dir) / "energy.csv", csv_of(mu, &v));
      out << Json{{"sigma", sigma(mu)}, {"cells", mu.cells()}, {"digest", mu.digest()}}.dump() << "\n";
      return kExitOk;
    }
    if (*transport_cmd) {
      GridMeasure a = parse_measure(mu_spec, cells), b = parse_measure(nu_spec, cells);
      double w = 0.0;
      Json plan;
      if (metric == "line") {
        w = wasserstein_R(a, b);
        plan = {{"coupling", "monotone quantile"}, {"cells", {a.cells(), b.cells()}}};
      } else if (metric == "geodesic") {
        w = wasserstein_T_geodesic(a, b);
        plan = {{"coupling", "cyclically shifted quantile"}, {"cells", {a.cells(), b.cells()}}};
      } else {
        w = wasserstein_T_chord(a, b);
        plan = {{"coupling", "transportation simplex on cell midpoints"}, {"cells", {a.cells(), b.cells()}}};
      }
      out << Json{{"W", w}, {"metric", metric}, {"plan", plan}}.dump() << "\n";
      return kExitOk;
    }
    if (*verify_cmd) {
      auto t0 = std::chrono::steady_clock::now();
      auto reports = run_suite(suite, seed, cells);
      double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::map<std::string, std::string> files;
      for (const auto& r : reports) files[r.suite] += r.to_json().dump() + "\n";
      fs::path dir(out_dir);
      for (const auto& [s, content] : files) write_file_atomic(dir / (s + ".jsonl"), content);
      auto summary = summarize(reports);
      write_file_atomic(dir / "summary.txt", format_summary(summary, false));
      write_file_atomic(dir / "run_config.toml", config);
      out << format_summary(summary, true);
      out << "total runtime " << dt << " s\n";
      bool failed = false;
      for (const auto& r : reports)
        if (!r.vacuous && !r.pass) {
          failed = true;
          err << "FAIL " << r.id << " lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs) << "\n";
        }
      return failed ? kExitVerificationFailed : kExitOk;
    }
    if (*report_cmd) {
      for (const auto& p : export_plot_data(report_dir)) out << p.string() << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace freeprob
