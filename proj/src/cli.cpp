#include "stochq/cli.hpp"

#include "stochq/correspondence.hpp"
#include "stochq/io.hpp"
#include "stochq/markov_embed.hpp"
#include "stochq/sh_sim.hpp"
#include "stochq/stochastic.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace stochq::cli {

using io::Json;

namespace {

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::embed, "embed"},
    {Command::sh_sim, "sh-sim"},
    {Command::divisibility, "divisibility"},
    {Command::correspond, "correspond"},
    {Command::unistochastic, "unistochastic"},
    {Command::dilate, "dilate"},
    {Command::extract_hamiltonian, "extract-hamiltonian"},
};

double positive(std::optional<double> v, double fallback, const char* field) {
  const double x = v.value_or(fallback);
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(std::string(field) + " must be positive and finite", field);
  return x;
}

double optional_number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ValidationError("expected a number", key);
  return j[key].get<double>();
}

Json header(const ExperimentConfig& c) {
  return Json{{"schema", io::kSchemaVersion}, {"command", to_string(c.command)}};
}

// ---- embed ---------------------------------------------------------------

struct NamedLaw {
  embed::SecondOrderODE F;
  std::string description;
};

NamedLaw law_from_json(const Json& in) {
  const std::string name = in.contains("law") ? in["law"].get<std::string>() : "harmonic";
  if (name == "harmonic") return {[](double x, double) { return -x; }, "F(x,y) = -x"};
  if (name == "free") return {[](double, double) { return 0.0; }, "F(x,y) = 0"};
  if (name == "cubic") return {[](double x, double) { return -x * x * x; }, "F(x,y) = -x^3"};
  if (name == "even") return {[](double x, double y) { return -x + y * y; }, "F(x,y) = -x + y^2"};
  if (name == "damped") {
    const double gamma = optional_number(in, "gamma", 0.1);
    std::ostringstream d;
    d << "F(x,y) = -x - " << io::format_double(gamma) << " y";
    return {[gamma](double x, double y) { return -x - gamma * y; }, d.str()};
  }
  throw ValidationError("unknown law '" + name + "' (harmonic, free, cubic, even, damped)", "law");
}

Report run_embed(const ExperimentConfig& c, const Json& in) {
  const double dt = positive(c.dt, 1e-3, "dt");
  const double T = positive(c.T, 2.0 * std::numbers::pi, "T");
  const double x0 = optional_number(in, "x0", 1.0);
  const double v0 = optional_number(in, "v0", 0.0);
  const NamedLaw law = law_from_json(in);

  const auto traj = embed::integrate_embedded(law.F, x0, v0, dt, T);
  const auto ctraj = embed::integrate_complex_flow(law.F, Complex(x0, v0), dt, T);
  double deviation = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    deviation = std::max({deviation, std::abs(traj[k].x - ctraj[k].z.real()), std::abs(traj[k].y - ctraj[k].z.imag())});
  }
  const auto reversal = embed::check_time_reversal_invariance(law.F, 1000, c.seed);
  const auto reversed = embed::time_reverse(traj);
  auto energy = [](const embed::Sample& s) { return 0.5 * (s.x * s.x + s.y * s.y); };

  Json r = header(c);
  r["law"] = law.description;
  r["parameters"] = {{"dt", dt}, {"T", T}, {"x0", x0}, {"v0", v0}, {"seed", c.seed}, {"steps", traj.size() - 1}};
  r["tolerances"] = {{"reversal_invariance", embed::kReversalTolerance}, {"reversal_box", embed::kReversalBox}};
  r["final"] = {{"t", traj.back().t}, {"x", traj.back().x}, {"y", traj.back().y}};
  r["energy_initial"] = energy(traj.front());
  r["energy_final"] = energy(traj.back());
  r["complex_flow_max_deviation"] = deviation;
  r["time_reversal"] = {{"invariant", reversal.invariant},
                        {"max_violation", reversal.max_violation},
                        {"samples", 1000},
                        {"reversed_trajectory_residual", embed::first_order_residual(law.F, reversed)},
                        {"forward_trajectory_residual", embed::first_order_residual(law.F, traj)}};
  r["csv_columns"] = "t,x,y";
  std::ostringstream csv;
  io::write_csv(csv, traj);
  return {r, csv.str()};
}

// ---- sh-sim --------------------------------------------------------------

Report run_sh_sim(const ExperimentConfig& c, const Json& in) {
  const double dt = positive(c.dt, 1e-4, "dt");
  const double T = positive(c.T, 10.0, "T");
  if (c.stride < 1) throw ValidationError("stride must be >= 1", "stride");
  sh::Integrator method;
  if (c.integrator == "strang") method = sh::Integrator::strang;
  else if (c.integrator == "rk4") method = sh::Integrator::rk4;
  else throw ValidationError("integrator must be strang or rk4", "integrator");

  const auto H = io::hermitian_from_json(in);
  ComplexVector psi0 = ComplexVector::Unit(H.dim(), 0);
  if (in.contains("psi0")) psi0 = io::complex_vector_from_json(in["psi0"], "psi0");
  if (psi0.size() != H.dim()) throw ValidationError("psi0 has the wrong length", "psi0");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ValidationError("psi0 must be normalized", "psi0");

  const auto sys = sh::sh_decompose(H);
  const auto traj = sh::sh_integrate(sys, sh::sh_split(psi0), dt, T, method, c.stride);
  const sh::Propagator exact(H);

  double max_dev = 0.0;
  double max_fid_err = 0.0;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
  const double e0 = sh::sh_energy(sys, traj.states.front());
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const ComplexVector psi = sh::sh_recombine(traj.states[k]);
    const ComplexVector ref = exact.apply(psi0, traj.t[k]);
    max_dev = std::max(max_dev, (psi - ref).norm());
    max_fid_err = std::max(max_fid_err, std::abs(1.0 - std::norm(ref.dot(psi))));
    max_norm_drift = std::max(max_norm_drift, std::abs(psi.squaredNorm() - 1.0));
    max_energy_drift = std::max(max_energy_drift, std::abs(sh::sh_energy(sys, traj.states[k]) - e0));
  }
  const auto modes = sh::sh_normal_modes(H);

  Json r = header(c);
  r["parameters"] = {{"dt", dt}, {"T", T}, {"stride", c.stride}, {"integrator", c.integrator}, {"n", H.dim()}};
  r["tolerances"] = {{"hermitian", sh::kHermitianTolerance}, {"exact_evolution_target", 1e-6}};
  r["max_deviation_from_exact"] = max_dev;
  r["max_fidelity_error"] = max_fid_err;
  r["max_norm_drift"] = max_norm_drift;
  r["energy_initial"] = e0;
  r["max_energy_drift"] = max_energy_drift;
  r["normal_mode_frequencies"] = io::to_json(modes.frequencies);
  r["csv_columns"] = "t,q_1..q_N,p_1..p_N";
  std::ostringstream csv;
  io::write_csv(csv, traj, H.dim());
  return {r, csv.str()};
}

// ---- divisibility --------------------------------------------------------

Report run_divisibility(const ExperimentConfig& c, const Json& in, int* exit_code) {
  const auto process = io::process_from_json(in);
  stochastic::DivisibilityOptions options;
  options.max_pivots = c.max_iters.value_or(options.max_pivots);
  if (options.max_pivots < 1) throw ValidationError("max-iters must be positive", "max-iters");
  if (c.jobs < 1) throw ValidationError("jobs must be positive", "jobs");
  const auto checks = stochastic::check_process(process, options, c.jobs);

  bool any_indivisible = false;
  bool any_indeterminate = false;
  Json list = Json::array();
  for (const auto& ch : checks) {
    Json v = io::to_json(ch.verdict);
    v["t"] = ch.t;
    v["t_mid"] = ch.t_mid;
    v["t0"] = ch.t0;
    list.push_back(std::move(v));
    any_indivisible |= ch.verdict.status == stochastic::Divisibility::indivisible;
    any_indeterminate |= ch.verdict.status == stochastic::Divisibility::indeterminate;
  }
  Json r = header(c);
  r["status"] = any_indivisible ? "indivisible" : (any_indeterminate ? "indeterminate" : "divisible");
  r["checks"] = list;
  r["tolerances"] = {{"relaxation", options.relaxation},
                     {"witness", options.witness_tolerance},
                     {"column_sum", stochastic::kSumTolerance}};
  r["max_pivots"] = options.max_pivots;
  if (any_indeterminate) *exit_code = kIndeterminate;
  return {r, std::nullopt};
}

// ---- correspond ----------------------------------------------------------

Report run_correspond(const ExperimentConfig& c, const Json& in) {
  using namespace correspondence;
  const UnitaryMatrix U(io::complex_matrix_from_json(in, ""), optional_number(in, "t", 0.0),
                        optional_number(in, "t0", 0.0));
  const Eigen::Index n = U.dim();
  RealVector p0 = RealVector::Unit(n, 0);
  if (in.contains("initial")) p0 = io::real_vector_from_json(in["initial"], "initial");
  if (p0.size() != n) throw ValidationError("initial has the wrong length", "initial");
  const Distribution p(p0);

  const auto gamma = quantum_to_stochastic(U);
  const RealMatrix& g = gamma.matrix();
  const double ds_residual = std::max((g.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                                      (g.colwise().sum().array() - 1.0).abs().maxCoeff());
  const auto rho_t = evolve_density(U, density_from_distribution(p));
  const RealVector diag = rho_t.matrix().diagonal().real();
  const RealVector pt = stochastic::propagate(gamma, p).probabilities();

  const PotentialMatrix theta(U.matrix());
  const auto kraus = kraus_from_potential(theta);
  const UnitaryMatrix conj_u(U.matrix().conjugate(), U.t(), U.t0());
  const RealMatrix g_conj = quantum_to_stochastic(conj_u).matrix();

  Json r = header(c);
  r["gamma"] = {{"matrix", io::to_json(g)}, {"t", gamma.t()}, {"t0", gamma.t0()}};
  r["doubly_stochastic_residual"] = ds_residual;
  r["born"] = {{"p0", io::to_json(p0)},
               {"gamma_p0", io::to_json(pt)},
               {"diag_rho_t", io::to_json(diag)},
               {"max_deviation", (diag - pt).cwiseAbs().maxCoeff()}};
  r["kraus_identity_residual"] = kraus_identity_residual(kraus.operators());
  r["kraus_reconstruction_error"] = max_abs(RealMatrix(kraus_transition(kraus) - g));
  r["conjugation_invariance_error"] = max_abs(RealMatrix(g_conj - g));
  r["tolerances"] = {{"unitary", kUnitaryTolerance}, {"born", 1e-12}, {"doubly_stochastic", 1e-12}};
  return {r, std::nullopt};
}

// ---- unistochastic / dilate ---------------------------------------------

stochastic::TransitionMatrix transition_from_json(const Json& in) {
  const Json* source = nullptr;
  if (in.contains("matrix")) source = &in["matrix"];
  else if (in.contains("gamma") && in["gamma"].is_object() && in["gamma"].contains("matrix")) source = &in["gamma"]["matrix"];
  if (!source) throw ValidationError("missing transition matrix", "matrix");
  const RealMatrix m = io::real_matrix_from_json(*source, "matrix");
  auto checked = stochastic::validate(m, optional_number(in, "t", 0.0), optional_number(in, "t0", 0.0));
  if (auto* bad = std::get_if<stochastic::ViolationReport>(&checked)) {
    throw ValidationError("not column-stochastic: " + bad->summary(), "matrix");
  }
  return std::get<stochastic::TransitionMatrix>(std::move(checked));
}

Report run_unistochastic(const ExperimentConfig& c, const Json& in, int* exit_code) {
  using namespace correspondence;
  const auto gamma = transition_from_json(in);
  UnistochasticOptions options;
  options.tol = positive(c.tol, options.tol, "tol");
  options.max_iters = c.max_iters.value_or(options.max_iters);
  if (options.max_iters < 1) throw ValidationError("max-iters must be positive", "max-iters");
  options.seed = c.seed;
  const auto result = unistochastic_search(gamma, options);
  if (result.outcome == SearchOutcome::no_completion_found) *exit_code = kIndeterminate;

  Json r = header(c);
  r["outcome"] = to_string(result.outcome);
  r["unitary"] = result.unitary ? io::complex_to_json(result.unitary->matrix()) : Json(nullptr);
  r["best_residual"] = std::isfinite(result.best_residual) ? Json(result.best_residual) : Json(nullptr);
  r["starts_used"] = result.starts_used;
  r["certificate"] = result.certificate.empty() ? Json(nullptr) : Json(result.certificate);
  if (result.unitary) {
    r["modulus_error"] = max_abs(RealMatrix(result.unitary->matrix().cwiseAbs2() - gamma.matrix()));
  }
  if (gamma.dim() <= kMaxOrthostochasticDim) {
    const auto ortho = orthostochastic_check(gamma);
    r["orthostochastic"] = {{"found", ortho.orthogonal.has_value()},
                            {"orthogonal", ortho.orthogonal ? io::to_json(*ortho.orthogonal) : Json(nullptr)},
                            {"reason", ortho.reason}};
  } else {
    r["orthostochastic"] = {{"found", nullptr}, {"reason", "sign search limited to N <= 4"}};
  }
  r["parameters"] = {{"tol", options.tol}, {"max_iters", options.max_iters}, {"starts", options.starts}, {"seed", options.seed}};
  return {r, std::nullopt};
}

Report run_dilate(const ExperimentConfig& c, const Json& in) {
  using namespace correspondence;
  std::optional<KrausSet> kraus;
  std::optional<RealMatrix> source;
  if (in.contains("kraus")) {
    kraus.emplace(io::kraus_from_json(in["kraus"]));
  } else {
    const auto gamma = transition_from_json(in);
    RealMatrix phases = RealMatrix::Zero(gamma.dim(), gamma.dim());
    if (in.contains("phases")) phases = io::real_matrix_from_json(in["phases"], "phases");
    kraus.emplace(kraus_from_potential(potential_from_transition(gamma, phases)));
    source = gamma.matrix();
  }
  const RealMatrix induced = kraus_transition(*kraus);
  const auto dil = stinespring_dilate(*kraus);
  const RealMatrix marginal = dilation_marginal(dil);
  const Eigen::Index n = kraus->dim();

  Json r = header(c);
  r["kraus"] = io::to_json(*kraus);
  r["kraus_identity_residual"] = kraus_identity_residual(kraus->operators());
  r["kraus_transition"] = io::to_json(induced);
  if (source) r["kraus_reconstruction_error"] = max_abs(RealMatrix(induced - *source));
  r["dilation"] = {{"dim", dil.unitary.dim()},
                   {"system_dim", dil.system_dim},
                   {"ancilla_dim", dil.ancilla_dim},
                   {"ancilla_input", dil.ancilla_input},
                   {"n_cubed_bound", n * n * n},
                   {"unitary", io::complex_to_json(dil.unitary.matrix())},
                   {"unitarity_defect", unitarity_defect(dil.unitary.matrix())},
                   {"marginal", io::to_json(marginal)},
                   {"marginal_error", max_abs(RealMatrix(marginal - induced))}};
  r["tolerances"] = {{"kraus_identity", 1e-12}, {"unitary", kUnitaryTolerance}, {"marginal", 1e-10}};
  return {r, std::nullopt};
}

// ---- extract-hamiltonian -------------------------------------------------

Report run_extract(const ExperimentConfig& c, const Json& in) {
  using namespace correspondence;
  const double dt = positive(c.dt, 1e-4, "dt");
  const auto H = io::hermitian_from_json(in);
  const double t = optional_number(in, "t", 0.5);
  const sh::Propagator prop(H);
  const Evolution evolution = [&](double s) { return UnitaryMatrix(prop.unitary(s), s, 0.0); };
  const auto coarse = hamiltonian_from_evolution(evolution, t, dt);
  const auto fine = hamiltonian_from_evolution(evolution, t, 0.5 * dt);
  const double err = max_abs(ComplexMatrix(coarse.H.matrix() - H.matrix()));
  const double err_half = max_abs(ComplexMatrix(fine.H.matrix() - H.matrix()));

  Json r = header(c);
  r["parameters"] = {{"t", t}, {"dt", dt}};
  r["hamiltonian"] = io::to_json(coarse.H);
  r["anti_hermitian_residual"] = coarse.anti_hermitian_residual;
  r["recovery_error"] = err;
  r["recovery_error_half_dt"] = err_half;
  r["convergence_ratio"] = err_half > 0.0 ? Json(err / err_half) : Json(nullptr);
  r["tolerances"] = {{"recovery", 5e-6}, {"convergence_ratio", 3.5}};
  return {r, std::nullopt};
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& entry : kCommands) {
    if (entry.command == c) return entry.name;
  }
  return "?";
}

std::optional<Command> command_from_string(const std::string& name) {
  for (const auto& entry : kCommands) {
    if (name == entry.name) return entry.command;
  }
  return std::nullopt;
}

void apply_config_overrides(ExperimentConfig& config, const nlohmann::json& o) {
  if (!o.is_object()) throw ValidationError("config must be a JSON object", "config");
  auto num = [&](const char* key) {
    if (!o[key].is_number()) throw ValidationError("expected a number", key);
    return o[key].get<double>();
  };
  for (const auto& [key, value] : o.items()) {
    if (key == "input") config.input = value.get<std::string>();
    else if (key == "output") config.output = value.get<std::string>();
    else if (key == "dt") config.dt = num("dt");
    else if (key == "T") config.T = num("T");
    else if (key == "tol") config.tol = num("tol");
    else if (key == "seed") config.seed = value.get<std::uint64_t>();
    else if (key == "max-iters") config.max_iters = static_cast<long>(num("max-iters"));
    else if (key == "jobs") config.jobs = static_cast<int>(num("jobs"));
    else if (key == "stride") config.stride = static_cast<long>(num("stride"));
    else if (key == "integrator") config.integrator = value.get<std::string>();
    else throw ValidationError("unknown config key '" + key + "'", key);
  }
}

std::filesystem::path csv_path_for(const std::filesystem::path& json_path) {
  auto p = json_path;
  p.replace_extension(".csv");
  return p;
}

void emit_report(const Report& report, const std::filesystem::path& path) {
  io::write_text_file(path, report.json.dump(2) + "\n");
  if (report.csv) io::write_text_file(csv_path_for(path), *report.csv);
}

Report execute(const ExperimentConfig& config, int* exit_code) {
  *exit_code = kOk;
  const Json in = io::read_json_file(config.input);
  switch (config.command) {
    case Command::embed: return run_embed(config, in);
    case Command::sh_sim: return run_sh_sim(config, in);
    case Command::divisibility: return run_divisibility(config, in, exit_code);
    case Command::correspond: return run_correspond(config, in);
    case Command::unistochastic: return run_unistochastic(config, in, exit_code);
    case Command::dilate: return run_dilate(config, in);
    case Command::extract_hamiltonian: return run_extract(config, in);
  }
  throw ValidationError("unknown command", "command");
}

int run(const ExperimentConfig& config, std::ostream& err) {
  auto fail = [&](const std::string& message, const std::string& field) {
    err << Json{{"error", message}, {"field", field.empty() ? Json(nullptr) : Json(field)}}.dump() << "\n";
    return static_cast<int>(kValidationFailure);
  };
  try {
    if (config.output.empty()) return fail("no output path given", "output");
    int code = kOk;
    const Report report = execute(config, &code);
    emit_report(report, config.output);
    return code;
  } catch (const ValidationError& e) {
    return fail(e.what(), e.field());
  } catch (const nlohmann::json::exception& e) {
    return fail(std::string("malformed input: ") + e.what(), "input");
  } catch (const std::exception& e) {
    return fail(e.what(), "");
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Stochastic-quantum correspondence experiments"};
  app.require_subcommand(1);
  app.footer(
      "Outputs: --output names the JSON report (schema 1). Commands that produce\n"
      "trajectories also write <output stem>.csv:\n"
      "  embed   columns t,x,y\n"
      "  sh-sim  columns t,q_1..q_N,p_1..p_N\n"
      "Defaults: embed dt=1e-3 T=2pi; sh-sim dt=1e-4 T=10 stride=100;\n"
      "divisibility max-iters=1e6 (simplex pivots); unistochastic tol=1e-10\n"
      "max-iters=20000 (per start); extract-hamiltonian dt=1e-4.\n"
      "Exit status: 0 success, 1 validation failure, 2 solver indeterminate.");

  ExperimentConfig config;
  std::string input, output, config_path;
  std::optional<double> dt, T, tol;
  std::optional<long> max_iters;

  for (const auto& entry : kCommands) {
    auto* sub = app.add_subcommand(entry.name, "run the " + std::string(entry.name) + " experiment");
    sub->add_option("--input", input, "input JSON file")->required();
    sub->add_option("--output", output, "output JSON report path")->required();
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--T", T, "final time");
    sub->add_option("--tol", tol, "convergence tolerance");
    sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--max-iters", max_iters, "iteration cap");
    sub->add_option("--jobs", config.jobs, "parallel workers for independent checks");
    sub->add_option("--config", config_path, "JSON object overriding flags");
    if (entry.command == Command::sh_sim) {
      sub->add_option("--stride", config.stride, "record every k-th step in the CSV");
      sub->add_option("--integrator", config.integrator, "strang (default) or rk4");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(kValidationFailure);
  }

  for (const auto& entry : kCommands) {
    if (app.got_subcommand(entry.name)) config.command = entry.command;
  }
  config.input = input;
  config.output = output;
  config.dt = dt;
  config.T = T;
  config.tol = tol;
  config.max_iters = max_iters;
  if (!config_path.empty()) {
    try {
      apply_config_overrides(config, io::read_json_file(config_path));
    } catch (const std::exception& e) {
      const auto* ve = dynamic_cast<const ValidationError*>(&e);
      std::cerr << Json{{"error", e.what()}, {"field", ve ? Json(ve->field()) : Json("config")}}.dump() << "\n";
      return kValidationFailure;
    }
  }
  return run(config, std::cerr);
}

}  // namespace stochq::cli
