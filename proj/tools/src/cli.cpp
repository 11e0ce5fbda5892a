#include "qdim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdim/conformal_measure.hpp"
#include "qdim/error.hpp"
#include "qdim/pressure.hpp"
#include "qdim/quantization.hpp"
#include "qdim/system_io.hpp"

namespace qdim::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON cannot hold infinities; they are written as strings.
ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

  [[nodiscard]] std::string text() const {
    std::string s;
    auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) s += ',';
        s += cells[k];
      }
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot write " + path);
  f << text;
  if (!f) throw SpecError("failed writing " + path);
}

class Session {
 public:
  Session(const CommandSpec& spec, std::ostream& out)
      : spec_(spec), out_(out), loaded_(load_system_file(spec.system_path)) {}

  int run();

 private:
  [[nodiscard]] std::size_t single_truncation() const {
    if (spec_.m_list.size() > 1) throw SpecError("this command takes a single M in --m-list");
    return spec_.m_list.empty() ? 0 : spec_.m_list.front();
  }

  [[nodiscard]] double tol() const { return spec_.tol.value_or(0.0); }

  [[nodiscard]] PotentialFamily normalized(std::size_t truncation) const {
    const IfsSystem& sys = loaded_.system;
    try {
      return normalize_pressure(loaded_.family, sys, 8, 0);
    } catch (const SpecError&) {
      if (truncation == 0) throw SpecError("this infinite system needs a truncation (--m-list M)");
      return normalize_pressure(loaded_.family, sys, 8, truncation);
    }
  }

  [[nodiscard]] std::unique_ptr<PressureModel> model(std::size_t truncation) const {
    PressureOptions o;
    o.truncation = truncation;
    o.threads = spec_.threads;
    return std::make_unique<PressureModel>(loaded_.system, normalized(truncation), o);
  }

  [[nodiscard]] ordered_json header() const {
    ordered_json j;
    j["command"] = spec_.subcommand;
    j["system_digest"] = loaded_.digest;
    j["seed"] = spec_.seed;
    if (!loaded_.system.label.empty()) j["label"] = loaded_.system.label;
    if (!loaded_.system.assumptions.empty()) j["assumptions"] = loaded_.system.assumptions;
    return j;
  }

  void emit_json(const ordered_json& j) {
    const std::string text = j.dump(2) + "\n";
    if (spec_.out_path.empty()) {
      out_ << text;
    } else {
      write_file(spec_.out_path, text);
    }
  }

  void emit_csv(const Csv& csv, ordered_json sidecar) {
    if (spec_.out_path.empty()) {
      out_ << csv.text();
      return;
    }
    write_file(spec_.out_path, csv.text());
    write_file(spec_.out_path + ".json", sidecar.dump(2) + "\n");
  }

  int pressure();
  int beta();
  int qdim();
  int dimh();
  int sweep();
  int sample();
  int quantize();
  int verify();
  int figure1();

  SampleSet draw(std::size_t default_count) const {
    SampleOptions o;
    o.threads = spec_.threads;
    const std::size_t m = single_truncation();
    if (m > 0) o.allow_deficit = true;
    return sample_measure(loaded_.system, normalized(m), spec_.samples.value_or(default_count),
                          spec_.depth.value_or(0), m, spec_.seed, o);
  }

  const CommandSpec& spec_;
  std::ostream& out_;
  SystemSpec loaded_;
};

int Session::run() {
  const std::string& c = spec_.subcommand;
  if (c == "pressure") return pressure();
  if (c == "beta") return beta();
  if (c == "qdim") return qdim();
  if (c == "dimh") return dimh();
  if (c == "sweep") return sweep();
  if (c == "sample") return sample();
  if (c == "quantize") return quantize();
  if (c == "verify") return verify();
  if (c == "figure1") return figure1();
  throw SpecError("unknown subcommand " + c);
}

int Session::pressure() {
  const std::size_t m = single_truncation();
  const auto pm = model(m);
  const PressureEstimate e = pm->estimate(*spec_.q, *spec_.t);
  ordered_json j = header();
  j["q"] = e.q;
  j["t"] = e.t;
  j["truncation"] = m;
  j["pressure"] = num(e.value);
  j["finite"] = e.finite;
  j["exact"] = e.exact;
  j["depths"] = e.depths;
  ordered_json per = ordered_json::array();
  for (double v : e.per_depth) per.push_back(num(v));
  j["per_depth"] = per;
  j["error_indicator"] = num(e.error_indicator);
  j["tail_bound"] = num(e.tail_bound);
  if (spec_.depth) j["word_sum_at_depth"] = num(pm->word_sum(e.q, e.t, *spec_.depth));
  emit_json(j);
  return kOk;
}

int Session::beta() {
  const std::size_t m = single_truncation();
  const auto pm = model(m);
  if (spec_.q) {
    const BetaResult b = solve_beta(*pm, *spec_.q, tol());
    const ThetaResult th = pm->effective_theta(*spec_.q);
    ordered_json j = header();
    j["q"] = *spec_.q;
    j["truncation"] = m;
    j["beta"] = b.beta;
    j["pressure_at_root"] = b.pressure_at_root;
    j["theta"] = num(th.theta);
    j["theta_method"] = to_string(th.method);
    j["tolerance"] = spec_.tol ? *spec_.tol : pm->default_tolerance();
    j["iterations"] = b.iterations;
    emit_json(j);
    return kOk;
  }
  const TemperatureSample ts = temperature_sample(*pm, linear_grid(0.0, 1.0, 21), tol());
  Csv csv({"q", "beta_q"});
  for (const auto& [q, b] : ts.points) csv.row({fmt(q), fmt(b)});
  ordered_json side = header();
  side["truncation"] = m;
  side["convexity_defect"] = ts.convexity_defect;
  side["strictly_decreasing"] = ts.strictly_decreasing;
  side["tolerance"] = spec_.tol ? *spec_.tol : pm->default_tolerance();
  emit_csv(csv, side);
  return kOk;
}

int Session::qdim() {
  const std::size_t m = single_truncation();
  const auto pm = model(m);
  const QdimSolution s = solve_quantization_dim(*pm, *spec_.r, tol());
  ordered_json j = header();
  j["r"] = s.r;
  j["truncation"] = m;
  j["q_r"] = s.q_r;
  j["kappa_r"] = s.kappa_r;
  j["D_r"] = s.D_r;
  j["beta_at_q_r"] = s.beta_at_q;
  j["residual"] = s.residual;
  j["tolerance"] = s.tolerance;
  j["bisection_steps"] = s.trace.size();
  emit_json(j);
  return kOk;
}

int Session::dimh() {
  const std::size_t m = single_truncation();
  const auto pm = model(m);
  const BetaResult b = solve_beta(*pm, 0.0, tol());
  ordered_json j = header();
  j["truncation"] = m;
  j["dim_h"] = b.beta;
  j["pressure_at_root"] = b.pressure_at_root;
  j["tolerance"] = spec_.tol ? *spec_.tol : pm->default_tolerance();
  emit_json(j);
  return kOk;
}

int Session::sweep() {
  PressureOptions base;
  base.threads = spec_.threads;
  const std::size_t largest = *std::max_element(spec_.m_list.begin(), spec_.m_list.end());
  const SweepResult s =
      truncation_sweep(loaded_.system, normalized(largest), *spec_.r, spec_.m_list, base, tol());
  Csv csv({"M", "kappa_rM", "degenerate"});
  for (const auto& e : s.entries) {
    csv.row({std::to_string(e.truncation), fmt(e.kappa), e.degenerate ? "1" : "0"});
  }
  ordered_json side = header();
  side["r"] = s.r;
  side["nondecreasing"] = s.nondecreasing;
  side["full_kappa"] = s.full_kappa ? ordered_json(*s.full_kappa) : ordered_json(nullptr);
  side["final_gap"] = s.final_gap ? ordered_json(*s.final_gap) : ordered_json(nullptr);
  emit_csv(csv, side);
  return kOk;
}

int Session::sample() {
  const SampleSet s = draw(100000);
  Csv csv({"point"});
  for (double x : s.points) csv.row({fmt(x)});
  ordered_json side = header();
  side["count"] = s.size();
  side["depth"] = s.depth;
  side["truncation"] = s.truncation;
  side["deficit"] = s.deficit;
  side["bias_bound"] = s.bias_bound;
  emit_csv(csv, side);
  return kOk;
}

int Session::quantize() {
  const SampleSet s = draw(100000);
  LloydOptions lo;
  lo.seed = spec_.seed;
  lo.threads = spec_.threads;
  Csv csv({"n", "r", "V_hat", "e_hat", "D_running"});
  ordered_json runs = ordered_json::array();
  std::vector<std::size_t> ns;
  std::vector<double> vs;
  for (std::size_t n : spec_.n_list) {
    const QuantizationRun run = lloyd_optimize(s, n, *spec_.r, lo);
    ns.push_back(n);
    vs.push_back(run.V_hat);
    std::string running;
    if (ns.size() >= 2 && run.V_hat > 0.0) {
      try {
        running = fmt(loglog_dimension(ns, vs, *spec_.r).D_hat);
      } catch (const Error&) {
        running = "nan";
      }
    }
    csv.row({std::to_string(n), fmt(run.r), fmt(run.V_hat), fmt(run.e_hat), running});
    ordered_json rj;
    rj["n"] = n;
    rj["V_hat"] = run.V_hat;
    rj["iterations"] = run.iterations;
    rj["restarts"] = run.restarts;
    rj["converged"] = run.converged;
    rj["restart_errors"] = run.restart_errors;
    rj["codebook"] = run.codebook.points;
    runs.push_back(rj);
  }
  ordered_json side = header();
  side["r"] = *spec_.r;
  side["samples"] = s.size();
  side["depth"] = s.depth;
  side["truncation"] = s.truncation;
  side["deficit"] = s.deficit;
  side["runs"] = runs;
  emit_csv(csv, side);
  return kOk;
}

int Session::verify() {
  const std::size_t m = single_truncation();
  const auto pm = model(m);
  const QdimSolution sol = solve_quantization_dim(*pm, *spec_.r, tol());
  const SampleSet s = draw(200000);
  LloydOptions lo;
  lo.seed = spec_.seed;
  lo.threads = spec_.threads;
  std::vector<std::size_t> ns = spec_.n_list;
  if (ns.empty()) ns = {4, 8, 16, 32, 64, 128, 256, 512};
  std::vector<QuantizationRun> runs;
  for (std::size_t n : ns) runs.push_back(lloyd_optimize(s, n, *spec_.r, lo));
  const DimensionEstimate est = estimate_Dr(runs, sol.kappa_r);
  const double gap = std::abs(est.D_hat - sol.kappa_r) / sol.kappa_r;
  const bool pass = gap <= spec_.gap;

  ordered_json j = header();
  j["r"] = *spec_.r;
  j["truncation"] = m;
  j["q_r"] = sol.q_r;
  j["kappa_r"] = sol.kappa_r;
  j["D_hat"] = est.D_hat;
  j["relative_gap"] = gap;
  j["gap_tolerance"] = spec_.gap;
  j["solver_tolerance"] = sol.tolerance;
  j["pass"] = pass;
  j["samples"] = s.size();
  j["sample_depth"] = s.depth;
  j["sample_deficit"] = s.deficit;
  j["surrogate_bias_bound"] = s.bias_bound;
  j["fit_slope"] = est.slope;
  j["fit_rms_residual"] = est.rms_residual;
  j["n"] = est.n;
  j["V_hat"] = est.V;
  ordered_json coeffs = ordered_json::array();
  for (const auto& c : est.coefficients) {
    ordered_json cj;
    cj["t"] = c.t;
    cj["n_V_pow_t_over_r"] = c.values;
    coeffs.push_back(cj);
  }
  j["coefficients"] = coeffs;
  emit_json(j);
  return pass ? kOk : kVerificationGap;
}

int Session::figure1() {
  const std::size_t m = single_truncation();
  const auto pm = model(m);
  const FigureData fig = legendre_and_figure_data(*pm, *spec_.r, linear_grid(0.0, 1.0, 21), tol());
  Csv csv({"q", "beta", "line", "chord", "legendre_alpha", "legendre_f", "intercept"});
  for (const auto& row : fig.rows) {
    csv.row({fmt(row.q), fmt(row.beta), fmt(row.line), fmt(row.chord), fmt(row.alpha),
             fmt(row.f), fmt(fig.intercept)});
  }
  ordered_json side = header();
  side["r"] = fig.r;
  side["truncation"] = m;
  side["q_r"] = fig.q_r;
  side["intersection"] = {fig.q_r, fig.intersection_y};
  side["intercept"] = fig.intercept;
  ordered_json spectrum = ordered_json::array();
  for (const auto& p : fig.spectrum) spectrum.push_back({p.alpha, p.f});
  side["spectrum"] = spectrum;
  emit_csv(csv, side);
  return kOk;
}

void require(bool ok, const std::string& what, const std::string& cmd) {
  if (!ok) throw SpecError(cmd + " requires " + what);
}

void validate(const CommandSpec& s) {
  const std::string& c = s.subcommand;
  require(!s.system_path.empty(), "--system", c);
  if (c == "pressure") {
    require(s.q.has_value(), "--q", c);
    require(s.t.has_value(), "--t", c);
  }
  if (c == "qdim" || c == "sweep" || c == "quantize" || c == "verify" || c == "figure1") {
    require(s.r.has_value(), "--r", c);
    require(*s.r > 0.0, "--r > 0", c);
  }
  if (c == "sweep") require(!s.m_list.empty(), "--m-list", c);
  if (c == "quantize") require(!s.n_list.empty(), "--n-list", c);
  if (c == "verify" && !s.n_list.empty()) require(s.n_list.size() >= 3, "at least 3 values in --n-list", c);
  for (std::size_t n : s.n_list) require(n >= 1, "--n-list values >= 1", c);
  if (s.samples) require(*s.samples >= 1, "--samples >= 1", c);
  if (s.depth) require(*s.depth >= 1, "--depth >= 1", c);
  if (s.tol) require(*s.tol > 0.0, "--tol > 0", c);
  require(s.threads >= 1, "--threads >= 1", c);
}

}  // namespace

std::optional<CommandSpec> parse_command_line(const std::vector<std::string>& args,
                                              std::ostream& out) {
  CommandSpec spec;
  CLI::App app{"Quantization dimension toolkit for conformal iterated function systems", "qdim"};
  app.require_subcommand(1);
  app.fallthrough();

  double q = 0.0, t = 0.0, r = 0.0, tol = 0.0;
  std::size_t depth = 0, samples = 0;
  auto* oq = app.add_option("--q", q, "Exponent q of the weights");
  auto* ot = app.add_option("--t", t, "Exponent t of the derivatives");
  auto* orr = app.add_option("--r", r, "Quantization order r");
  auto* od = app.add_option("--depth", depth, "Word depth (pressure) or sampling depth");
  auto* os = app.add_option("--samples", samples, "Monte-Carlo sample size N");
  auto* otol = app.add_option("--tol", tol, "Solver tolerance");
  app.add_option("--system", spec.system_path, "System JSON file");
  app.add_option("--out", spec.out_path, "Output path (stdout when omitted)");
  app.add_option("--n-list", spec.n_list, "Codebook sizes a,b,c")->delimiter(',');
  app.add_option("--m-list", spec.m_list, "Truncations a,b,c")->delimiter(',');
  app.add_option("--seed", spec.seed, "Random seed");
  app.add_option("--threads", spec.threads, "Worker threads");
  app.add_option("--gap", spec.gap, "verify: accepted relative gap");

  const std::vector<std::pair<std::string, std::string>> help = {
      {"pressure", "P(q, t) with depth data"},
      {"beta", "Temperature function beta(q); a 21-point grid without --q"},
      {"qdim", "Fixed point q_r, kappa_r = D_r"},
      {"dimh", "Hausdorff dimension beta(0)"},
      {"sweep", "kappa_{r,M} over truncations"},
      {"sample", "Monte-Carlo sample of the conformal measure"},
      {"quantize", "Lloyd codebooks and errors over --n-list"},
      {"verify", "Compare kappa_r with the empirical log-log estimate"},
      {"figure1", "beta curve, r q line, chord, intercept, Legendre data"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  std::vector<const char*> argv;
  argv.push_back("qdim");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw SpecError(e.what());
  }
  spec.subcommand = app.get_subcommands().front()->get_name();
  if (*oq) spec.q = q;
  if (*ot) spec.t = t;
  if (*orr) spec.r = r;
  if (*od) spec.depth = depth;
  if (*os) spec.samples = samples;
  if (*otol) spec.tol = tol;
  return spec;
}

int run_command(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    validate(spec);
    Session session(spec, out);
    return session.run();
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kMalformedSpec;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<CommandSpec> spec;
  try {
    spec = parse_command_line(args, out);
  } catch (const SpecError& e) {
    err << "usage error: " << e.what() << "\n";
    return kMalformedSpec;
  }
  if (!spec) return kOk;
  return run_command(*spec, out, err);
}

}  // namespace qdim::cli
