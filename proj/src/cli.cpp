#include "qthermo/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "qthermo/estimation.hpp"
#include "qthermo/mle.hpp"
#include "qthermo/oracle.hpp"

namespace qthermo::cli {

namespace {

const std::array<const char*, 4> kParameters = {"beta", "theta", "phi", "tau"};
const std::set<std::string> kQuantities = {"p0", "fisher", "qfi", "sld_coeffs", "tau_opt", "deficit"};

double parse_number(const std::string& text, const std::string& what) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("cannot parse " + what + " '" + text + "' as a number");
  }
  return value;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

ProtocolTime dispersive_tau_opt(InverseTemperature beta, const QubitPrep& prep) {
  return tau_opt_numeric(ModelId::Dispersive, beta, prep, std::numbers::pi);
}

}  // namespace

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

// ---------------------------------------------------------------------------
// Sweeps

SweepAxis SweepAxis::parse(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw UsageError("--sweep expects name=start:stop:steps, got '" + text + "'");
  }
  SweepAxis axis;
  axis.name = text.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream rest(text.substr(eq + 1));
  for (std::string piece; std::getline(rest, piece, ':');) {
    parts.push_back(piece);
  }
  if (parts.size() != 3) {
    throw UsageError("--sweep expects name=start:stop:steps, got '" + text + "'");
  }
  axis.start = parse_number(parts[0], "sweep start");
  axis.stop = parse_number(parts[1], "sweep stop");
  const double steps = parse_number(parts[2], "sweep steps");
  if (steps != std::floor(steps) || steps > 1e6) {
    throw UsageError("sweep steps must be an integer, got '" + parts[2] + "'");
  }
  axis.steps = static_cast<int>(steps);
  return axis;
}

double SweepAxis::at(int i) const { return i == steps - 1 ? stop : start + (stop - start) * i / (steps - 1); }

void SweepSpec::validate() const {
  if (swept.empty() || swept.size() > 2) {
    throw UsageError("a sweep needs one or two --sweep axes");
  }
  if (quantities.empty()) {
    throw UsageError("--quantities must name at least one of p0, fisher, qfi, sld_coeffs, tau_opt, deficit");
  }
  for (const auto& q : quantities) {
    if (!kQuantities.count(q)) {
      throw UsageError("unknown quantity '" + q + "'");
    }
  }
  std::set<std::string> seen;
  for (const auto& axis : swept) {
    if (std::find(kParameters.begin(), kParameters.end(), axis.name) == kParameters.end()) {
      throw UsageError("cannot sweep '" + axis.name + "'; choose from beta, theta, phi, tau");
    }
    if (!seen.insert(axis.name).second || fixed.count(axis.name)) {
      throw UsageError("parameter '" + axis.name + "' is given more than once");
    }
    if (axis.steps < 2 || !(axis.start < axis.stop)) {
      throw UsageError("sweep '" + axis.name + "' needs steps >= 2 and start < stop");
    }
  }
  for (const auto& [name, value] : fixed) {
    seen.insert(name);
  }
  const bool beta_only = std::all_of(quantities.begin(), quantities.end(), [](const auto& q) { return q == "tau_opt"; });
  for (const char* name : kParameters) {
    if (!seen.count(name) && (!beta_only || std::string(name) == "beta")) {
      throw UsageError(std::string("parameter '") + name + "' is neither fixed nor swept");
    }
  }
}

std::string sweep_csv(const SweepSpec& spec, const std::string& invocation) {
  spec.validate();
  std::ostringstream csv;
  csv << "# " << invocation << " | " << kVersion << '\n';

  std::vector<std::string> header;
  for (const auto& axis : spec.swept) {
    header.push_back(axis.name);
  }
  for (const auto& q : spec.quantities) {
    if (q == "sld_coeffs") {
      header.insert(header.end(), {"sld_identity", "sld_x", "sld_y", "sld_z"});
    } else {
      header.push_back(q);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    csv << (i ? "," : "") << header[i];
  }
  csv << '\n';

  const SweepAxis& outer = spec.swept.front();
  const int inner_steps = spec.swept.size() == 2 ? spec.swept[1].steps : 1;
  for (int i = 0; i < outer.steps; ++i) {
    for (int j = 0; j < inner_steps; ++j) {
      std::map<std::string, double> point = spec.fixed;
      point[outer.name] = outer.at(i);
      if (spec.swept.size() == 2) {
        point[spec.swept[1].name] = spec.swept[1].at(j);
      }
      const InverseTemperature beta(point.at("beta"));
      auto prep = [&] { return QubitPrep::wrapped(point.at("theta"), point.at("phi")); };
      auto time = [&] { return ProtocolTime(point.at("tau")); };

      std::vector<double> row;
      for (const auto& axis : spec.swept) {
        row.push_back(point.at(axis.name));
      }
      for (const auto& q : spec.quantities) {
        if (q == "p0") {
          row.push_back(static_cast<double>(probe_state<Real>(spec.model, beta, prep(), time())(0, 0).real()));
        } else if (q == "fisher") {
          row.push_back(fisher_information(spec.model, beta, prep(), time()));
        } else if (q == "qfi") {
          row.push_back(qfi(spec.model, beta, prep(), time()));
        } else if (q == "sld_coeffs") {
          const auto c = pauli_coefficients(sld(spec.model, beta, prep(), time()).matrix);
          row.insert(row.end(), {c.identity, c.x, c.y, c.z});
        } else if (q == "tau_opt") {
          row.push_back(spec.model == ModelId::Transverse ? tau_opt_transverse(beta).value()
                                                          : dispersive_tau_opt(beta, QubitPrep(0.0, 0.0)).value());
        } else {
          try {
            row.push_back(fi_deficit(spec.model, beta, time()));
          } catch (const DomainError&) {
            row.push_back(std::nan(""));
          }
        }
      }
      for (std::size_t k = 0; k < row.size(); ++k) {
        csv << (k ? "," : "") << format_real(row[k]);
      }
      csv << '\n';
    }
  }
  return csv.str();
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json out;
  out["version"] = kVersion;
  out["profile"] = profile;
  out["passed"] = passed();
  out["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    out["checks"].push_back({{"name", c.name},
                             {"passed", c.passed},
                             {"points", c.points},
                             {"tolerance", c.tolerance},
                             {"worst", c.worst},
                             {"worst_at", c.worst_at}});
  }
  return out;
}

namespace {

struct GridPoint {
  double beta, theta, phi, tau;
};

class Check {
 public:
  Check(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }
  void record(double error, const GridPoint& p) {
    ++result_.points;
    if (!(error <= result_.worst) || result_.points == 1) {
      result_.worst = error;
      result_.worst_at = {{"beta", p.beta}, {"theta", p.theta}, {"phi", p.phi}, {"tau", p.tau}};
    }
  }
  CheckResult finish() {
    result_.passed = result_.points > 0 && result_.worst <= result_.tolerance;
    return result_;
  }

 private:
  CheckResult result_;
};

std::vector<GridPoint> grid(std::vector<double> betas, std::vector<double> taus, int stride) {
  const auto thetas = linspace(0.0, std::numbers::pi, 10);
  std::vector<double> phis(10);
  for (int k = 0; k < 10; ++k) {
    phis[k] = 2.0 * std::numbers::pi * k / 10;
  }
  std::vector<GridPoint> out;
  long index = 0;
  for (double b : betas) {
    for (double th : thetas) {
      for (double ph : phis) {
        for (double t : taus) {
          if (index++ % stride == 0) {
            out.push_back({b, th, ph, t});
          }
        }
      }
    }
  }
  return out;
}

double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

ValidationReport run_validate(const std::string& profile, double zeta_scale) {
  if (profile != "strict" && profile != "fast") {
    throw UsageError("--profile must be strict or fast");
  }
  const int stride = profile == "strict" ? 1 : 4;
  ValidationReport report;
  report.profile = profile;

  const auto standard = grid(linspace(0.1, 20.0, 10), linspace(0.0, std::numbers::pi, 10), stride);
  const auto quadrature_grid = grid(linspace(0.5, 20.0, 10), linspace(0.0, 2.0, 10), stride);

  {
    Check check("transverse_state_vs_quadrature", 1e-10);
    const auto rule = gauss_hermite_rule<Real>(128);
    for (const auto& p : quadrature_grid) {
      const InverseTemperature beta(p.beta);
      const QubitPrep prep(p.theta, p.phi);
      const ProtocolTime time(p.tau);
      Vector3<Real> r, dr;
      detail::transverse_bloch<Real>(p.beta, prep, p.tau, zeta_scale, r, dr);
      const auto reference = oracle::probe_state_transverse_quadrature(beta, prep, time, 0.0, rule);
      check.record(static_cast<double>(trace_distance<Real>(from_bloch<Real>(r), reference.matrix())), p);
    }
    report.checks.push_back(check.finish());
  }
  {
    Check check("dispersive_state_vs_focksum", 1e-12);
    for (const auto& p : standard) {
      const InverseTemperature beta(p.beta);
      const QubitPrep prep(p.theta, p.phi);
      const ProtocolTime time(p.tau);
      const auto trunc = oracle::FockTruncation::for_tail(beta, 1e-16);
      const auto reference = oracle::probe_state_dispersive_focksum(beta, prep, time, trunc);
      const auto analytic = probe_state_dispersive<Real>(beta, prep, time);
      check.record(static_cast<double>(trace_distance<Real>(analytic.matrix(), reference.matrix())), p);
    }
    report.checks.push_back(check.finish());
  }
  for (const ModelId model : {ModelId::Transverse, ModelId::Dispersive}) {
    const std::string suffix(to_string(model));
    Check qfi_check("qfi_vs_numeric_" + suffix, 1e-6);
    Check fisher_check("fisher_vs_numeric_" + suffix, 1e-6);
    Check lyapunov("sld_lyapunov_residual_" + suffix, 1e-10);
    Check trace("sld_trace_" + suffix, 1e-10);
    Check moment("sld_second_moment_" + suffix, 1e-8);
    for (const auto& p : standard) {
      const InverseTemperature beta(p.beta);
      const QubitPrep prep(p.theta, p.phi);
      const ProtocolTime time(p.tau);
      const double h = oracle::default_step(beta);
      const auto jet = probe_jet<Real>(model, beta, prep, time);
      const double quantum = qfi(jet);
      if (quantum > 1e-12) {
        qfi_check.record(relative_error(oracle::qfi_numeric(model, beta, prep, time, h), quantum), p);
      }
      const double fisher = fisher_information(jet, Povm2::population());
      if (fisher > 1e-12) {
        fisher_check.record(relative_error(oracle::fisher_population_numeric(model, beta, prep, time, h), fisher), p);
      }
      const Sld l = sld(jet);
      const Matrix2c<Real> big_l = l.matrix.cast<std::complex<Real>>();
      const Matrix2c<Real> residual = (big_l * jet.rho + jet.rho * big_l) / Real(2) - jet.drho;
      lyapunov.record(static_cast<double>(residual.cwiseAbs().maxCoeff()), p);
      trace.record(static_cast<double>(std::abs((jet.rho * big_l).trace())), p);
      if (quantum > 1e-12) {
        const double second = static_cast<double>((jet.rho * big_l * big_l).trace().real());
        moment.record(std::abs(second / quantum - 1.0), p);
      }
    }
    for (Check* c : {&qfi_check, &fisher_check, &lyapunov, &trace, &moment}) {
      report.checks.push_back(c->finish());
    }
  }
  {
    Check check("dispersive_limit_scan", 0.02);
    const double lambda = 0.05;
    for (const double b : {2.0, 3.0}) {
      const auto scan = oracle::dispersive_limit_scan(InverseTemperature(b), QubitPrep(0.0, 0.0), ProtocolTime(0.6),
                                                      lambda, {5 * lambda, 10 * lambda, 20 * lambda, 40 * lambda});
      bool monotone = true;
      for (std::size_t k = 1; k < scan.points.size(); ++k) {
        monotone = monotone && scan.points[k].gap_lambda2_over_delta < scan.points[k - 1].gap_lambda2_over_delta;
      }
      const double last = scan.points.back().gap_lambda2_over_delta;
      // a non-monotone sequence or a different winner counts as a failure regardless of the final gap
      const double error = monotone && scan.winning_multiplier == 1 ? last : std::numeric_limits<double>::infinity();
      check.record(error, {b, 0.0, 0.0, 0.6});
    }
    report.checks.push_back(check.finish());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Estimation

nlohmann::json run_estimate(const EstimateRequest& request) {
  const InverseTemperature beta(request.beta);
  const QubitPrep prep(request.theta, request.phi);
  ProtocolTime time(0.0);
  if (request.tau) {
    time = ProtocolTime(*request.tau);
  } else if (request.model == ModelId::Transverse) {
    time = tau_opt_transverse(beta);
  } else {
    time = dispersive_tau_opt(beta, prep);
  }
  const CrlbReport r =
      crlb_experiment(request.model, beta, prep, time, request.shots, request.replicates, request.seed);

  nlohmann::json out;
  out["version"] = kVersion;
  out["input"] = {{"model", std::string(to_string(request.model))},
                  {"beta", request.beta},
                  {"theta", request.theta},
                  {"phi", request.phi},
                  {"tau", request.tau ? nlohmann::json(*request.tau) : nlohmann::json("opt")},
                  {"shots", request.shots},
                  {"replicates", request.replicates},
                  {"seed", request.seed}};
  out["tau"] = time.value();
  out["report"] = {{"beta_true", r.beta_true},
                   {"beta_hat_mean", r.beta_hat_mean},
                   {"empirical_variance", r.empirical_variance},
                   {"crlb", r.crlb},
                   {"qcrlb", r.qcrlb},
                   {"ratio", r.ratio},
                   {"replicates", r.replicates},
                   {"boundary_excluded", r.boundary_excluded}};
  return out;
}

// ---------------------------------------------------------------------------
// Entry point

namespace {

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  file << text;
  file.flush();
  if (!file) {
    throw UsageError("cannot write '" + path + "'");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qubit-probe thermometry of a harmonic oscillator", "qthermo"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string model_name = "transverse";
  std::string out_path;
  std::optional<double> beta, theta, phi;
  std::string tau_text;
  const auto models = CLI::IsMember({"transverse", "dispersive"});

  auto* sweep = app.add_subcommand("sweep", "Evaluate quantities over a one- or two-parameter lattice; writes CSV");
  std::vector<std::string> sweep_axes;
  std::vector<std::string> quantities;
  sweep->add_option("--model", model_name, "transverse or dispersive")->check(models);
  sweep->add_option("--beta", beta, "Fixed inverse temperature");
  sweep->add_option("--theta", theta, "Fixed polar angle (rad)");
  sweep->add_option("--phi", phi, "Fixed azimuth (rad)");
  sweep->add_option("--tau", tau_text, "Fixed interaction time");
  sweep->add_option("--sweep", sweep_axes, "name=start:stop:steps (up to two)")->required();
  sweep->add_option("--quantities", quantities, "p0,fisher,qfi,sld_coeffs,tau_opt,deficit")
      ->delimiter(',')
      ->required();
  sweep->add_option("--out", out_path, "Output file (default stdout)");

  auto* validate = app.add_subcommand("validate", "Cross-check closed forms against the brute-force oracles");
  std::string profile = "strict";
  double corrupt_zeta = 1.0;
  validate->add_option("--profile", profile, "strict or fast")->check(CLI::IsMember({"strict", "fast"}));
  validate->add_option("--out", out_path, "JSON report file (default stdout)");
  validate->add_option("--corrupt-zeta", corrupt_zeta)->group("");

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo maximum-likelihood estimation of beta against the CRLB");
  std::int64_t shots = 100000;
  int replicates = 1000;
  std::uint64_t seed = 42;
  estimate->add_option("--model", model_name, "transverse or dispersive")->check(models);
  estimate->add_option("--beta", beta, "True inverse temperature")->required();
  estimate->add_option("--theta", theta, "Polar angle (rad)");
  estimate->add_option("--phi", phi, "Azimuth (rad)");
  estimate->add_option("--tau", tau_text, "Interaction time or 'opt'");
  estimate->add_option("--shots", shots, "Measurements per replicate (M)");
  estimate->add_option("--replicates", replicates, "Independent replicates");
  estimate->add_option("--seed", seed, "RNG seed");
  estimate->add_option("--out", out_path, "JSON report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  std::string invocation = "qthermo";
  for (int i = 1; i < argc; ++i) {
    invocation += ' ';
    invocation += argv[i];
  }

  try {
    if (*sweep) {
      SweepSpec spec;
      spec.model = parse_model(model_name);
      if (beta) spec.fixed["beta"] = *beta;
      if (theta) spec.fixed["theta"] = *theta;
      if (phi) spec.fixed["phi"] = *phi;
      if (!tau_text.empty()) spec.fixed["tau"] = parse_number(tau_text, "--tau");
      for (const auto& text : sweep_axes) {
        spec.swept.push_back(SweepAxis::parse(text));
      }
      spec.quantities = quantities;
      emit(sweep_csv(spec, invocation), out_path, out);
      return kSuccess;
    }
    if (*validate) {
      const ValidationReport report = run_validate(profile, corrupt_zeta);
      emit(report.to_json().dump(2) + "\n", out_path, out);
      for (const auto& c : report.checks) {
        if (!c.passed) {
          err << "FAIL " << c.name << ": worst " << format_real(c.worst) << " > " << format_real(c.tolerance) << " at";
          for (const auto& [name, value] : c.worst_at) {
            err << ' ' << name << '=' << format_real(value);
          }
          err << '\n';
        }
      }
      return report.passed() ? kSuccess : kValidationFailure;
    }
    EstimateRequest request;
    request.model = parse_model(model_name);
    request.beta = *beta;
    request.theta = theta.value_or(0.0);
    request.phi = phi.value_or(0.0);
    if (!tau_text.empty() && tau_text != "opt") {
      request.tau = parse_number(tau_text, "--tau");
    }
    request.shots = shots;
    request.replicates = replicates;
    request.seed = seed;
    emit(run_estimate(request).dump(2) + "\n", out_path, out);
    return kSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const oracle::TruncationError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUsageError;
}

}  // namespace qthermo::cli
