// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "stochq/complex_repr.hpp"
#include "stochq/correspondence.hpp"
#include "stochq/markov_embed.hpp"
#include "stochq/random.hpp"
#include "stochq/sh_sim.hpp"
#include "stochq/stochastic.hpp"

#include "grid_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace stochq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // <= 0: none
  std::function<Outcome()> body;
};

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [FAILED]");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- 1 -----------------------------------------------------------------

Outcome complex_representation() {
  using namespace complex_repr;
  Outcome o;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst_product = 0.0;
  double worst_norm = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Mat2C a{u(rng), u(rng)};
    const Mat2C b{u(rng), u(rng)};
    worst_product = std::max(worst_product, (c2_mul(a, b).render() - a.render() * b.render()).cwiseAbs().maxCoeff());
    const double rhs = c2_modulus_sq(a) * c2_modulus_sq(b);
    worst_norm = std::max(worst_norm, std::abs(c2_modulus_sq(c2_mul(a, b)) - rhs) / rhs);
  }
  const double euler = (taylor_expm(linear_complex_structure() * std::numbers::pi) + kOne).cwiseAbs().maxCoeff();
  require(o, worst_product <= 1e-12, "product err " + fmt(worst_product) + " <= 1e-12");
  require(o, worst_norm <= 1e-10, "norm rel err " + fmt(worst_norm) + " <= 1e-10");
  require(o, euler <= 1e-10, "|e^{I pi} + 1| " + fmt(euler) + " <= 1e-10");
  return o;
}

// ---- 2 -----------------------------------------------------------------

Outcome markov_embedding() {
  using namespace embed;
  Outcome o;
  const int n = 7;
  const std::vector<SecondOrderDiscreteLaw> laws = {
      {[](int x, int y) { return (x + y) % 7 + 1; }, n},
      {[](int x, int y) { return (x * y) % 7 + 1; }, n},
      {[](int, int y) { return y; }, n},
      {[](int x, int y) { return (2 * x + 3 * y + 1) % 7 + 1; }, n},
      {[](int x, int y) { return x > y ? x : (y % 7) + 1; }, n},
  };
  int mismatches = 0;
  for (const auto& law : laws) {
    const auto traj = iterate_discrete(law, {3, 6}, 200);
    std::vector<int> x{traj[0].y};
    for (const auto& s : traj) x.push_back(s.x);
    for (std::size_t t = 1; t + 1 < x.size(); ++t) mismatches += x[t + 1] != law.F(x[t], x[t - 1]);
  }
  require(o, mismatches == 0, std::to_string(mismatches) + " recursion mismatches over 5 laws x 200 steps");

  const auto harmonic = integrate_embedded([](double x, double) { return -x; }, 1.0, 0.0, 1e-3, 2.0 * std::numbers::pi);
  const double ret = std::max(std::abs(harmonic.back().x - 1.0), std::abs(harmonic.back().y));
  require(o, ret <= 1e-6, "harmonic return err " + fmt(ret) + " <= 1e-6");

  auto F = [](double x, double) { return -x * x * x; };
  const auto real = integrate_embedded(F, 1.2, -0.4, 1e-3, 10.0);
  const auto cplx = integrate_complex_flow(F, {1.2, -0.4}, 1e-3, 10.0);
  double dev = 0.0;
  for (std::size_t k = 0; k < real.size(); ++k) {
    dev = std::max({dev, std::abs(real[k].x - cplx[k].z.real()), std::abs(real[k].y - cplx[k].z.imag())});
  }
  require(o, real.size() == cplx.size() && dev <= 1e-10, "complex vs real pair " + fmt(dev) + " <= 1e-10");
  return o;
}

// ---- 3 -----------------------------------------------------------------

Outcome symplectic_equivalence() {
  using namespace sh;
  Outcome o;
  random::Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 8;
    const HermitianMatrix H(random::hermitian(n, rng));
    const ComplexVector psi0 = random::unit_vector(n, rng);
    const auto traj = sh_integrate(sh_decompose(H), sh_split(psi0), 1e-4, 10.0, Integrator::strang, 10000);
    const Propagator prop(H);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
      worst = std::max(worst, (sh_recombine(traj.states[k]) - prop.apply(psi0, traj.t[k])).norm());
    }
  }
  require(o, worst <= 1e-5, "max ||Psi_sh - exp(-iHt)Psi0|| over 20 H " + fmt(worst) + " <= 1e-5");

  double drift = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2 + 3 * trial;
    const HermitianMatrix H(random::hermitian(n, rng));
    const auto sys = sh_decompose(H);
    const auto traj = sh_integrate(sys, sh_split(random::unit_vector(n, rng)), 1e-3, 100.0, Integrator::strang, 100);
    const double e0 = sh_energy(sys, traj.states.front());
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(sh_energy(sys, s) - e0) / std::abs(e0));
  }
  require(o, drift <= 1e-6, "energy rel drift T=100 " + fmt(drift) + " <= 1e-6");
  return o;
}

// ---- 4 -----------------------------------------------------------------

Outcome indivisibility() {
  using namespace stochastic;
  Outcome o;
  auto qubit = [](double t) {
    RealMatrix m(2, 2);
    const double c = std::cos(t) * std::cos(t);
    const double s = std::sin(t) * std::sin(t);
    m << c, s, s, c;
    return m;
  };
  const double h = std::numbers::pi / 2;
  const double q = std::numbers::pi / 4;
  const auto fixture = divisibility_check(TransitionMatrix(qubit(h), h, 0.0), TransitionMatrix(qubit(q), q, 0.0));
  require(o, fixture.status == Divisibility::indivisible, "qubit (pi/2, pi/4) -> " + to_string(fixture.status));

  random::Rng rng(4);
  int divisible = 0;
  double worst = 0.0;
  int oracle_cases = 0;
  int oracle_agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const RealMatrix g1 = random::column_stochastic(n, rng);
    const RealMatrix g2 = random::column_stochastic(n, rng);
    const TransitionMatrix first(g1, 1.0, 0.0);
    const TransitionMatrix total(RealMatrix(g2 * g1), 2.0, 0.0);
    const auto v = divisibility_check(total, first);
    if (v.status == Divisibility::divisible) {
      ++divisible;
      worst = std::max(worst, v.residual);
    }
    if (n == 2) {
      ++oracle_cases;
      oracle_agree += (v.status == Divisibility::divisible) == grid_oracle_divisible(total.matrix(), g1);
    }
  }
  require(o, divisible == 200 && worst <= 1e-9,
          std::to_string(divisible) + "/200 composites divisible, max residual " + fmt(worst) + " <= 1e-9");

  // Qubit family on a pi/16 grid: both verdicts occur.
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; b < a; ++b) {
      const double t = a * std::numbers::pi / 16;
      const double tp = b * std::numbers::pi / 16;
      const auto v = divisibility_check(TransitionMatrix(qubit(t), t, 0.0), TransitionMatrix(qubit(tp), tp, 0.0));
      ++oracle_cases;
      oracle_agree += (v.status == Divisibility::divisible) == grid_oracle_divisible(qubit(t), qubit(tp));
    }
  }
  ++oracle_cases;
  oracle_agree += (fixture.status == Divisibility::divisible) == grid_oracle_divisible(qubit(h), qubit(q));
  require(o, oracle_agree == oracle_cases,
          "grid oracle agreement " + std::to_string(oracle_agree) + "/" + std::to_string(oracle_cases) + " N=2 cases");
  return o;
}

// ---- 5 -----------------------------------------------------------------

Outcome correspondence_round_trips() {
  using namespace correspondence;
  Outcome o;
  random::Rng rng(5);
  double ds = 0.0, born = 0.0, kraus_id = 0.0, kraus_rec = 0.0, dil_u = 0.0, dil_m = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const UnitaryMatrix U(random::unitary(n, rng));
    const auto gamma = quantum_to_stochastic(U);
    const RealMatrix& g = gamma.matrix();
    ds = std::max({ds, (g.colwise().sum().array() - 1.0).abs().maxCoeff(),
                   (g.rowwise().sum().array() - 1.0).abs().maxCoeff()});
    const Distribution p0(random::distribution(n, rng));
    const RealVector diag = evolve_density(U, density_from_distribution(p0)).matrix().diagonal().real();
    born = std::max(born, (diag - stochastic::propagate(gamma, p0).probabilities()).cwiseAbs().maxCoeff());

    const auto kraus = kraus_from_potential(PotentialMatrix(U.matrix()));
    kraus_id = std::max(kraus_id, kraus_identity_residual(kraus.operators()));
    kraus_rec = std::max(kraus_rec, max_abs(RealMatrix(kraus_transition(kraus) - g)));
    const auto d = stinespring_dilate(kraus);
    dil_u = std::max(dil_u, unitarity_defect(d.unitary.matrix()));
    dil_m = std::max(dil_m, max_abs(RealMatrix(dilation_marginal(d) - g)));
  }
  require(o, ds <= 1e-12, "|U|^2 doubly stochastic " + fmt(ds) + " <= 1e-12");
  require(o, born <= 1e-12, "Born consistency " + fmt(born) + " <= 1e-12");
  require(o, kraus_id <= 1e-12, "Kraus identity " + fmt(kraus_id) + " <= 1e-12");
  require(o, kraus_rec <= 1e-14, "Kraus reconstruction " + fmt(kraus_rec) + " <= 1e-14");

  RealMatrix fx(3, 3);
  fx << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5;
  const TransitionMatrix fixture(fx);
  const auto fd = stinespring_dilate(kraus_from_potential(potential_from_transition(fixture, RealMatrix::Zero(3, 3))));
  dil_u = std::max(dil_u, unitarity_defect(fd.unitary.matrix()));
  dil_m = std::max(dil_m, max_abs(RealMatrix(dilation_marginal(fd) - fx)));
  require(o, fd.unitary.dim() == 9, "fixture dilation dim " + std::to_string(fd.unitary.dim()) + " = N^2");
  require(o, dil_u <= 1e-10, "dilation unitarity " + fmt(dil_u) + " <= 1e-10");
  require(o, dil_m <= 1e-10, "dilation marginal " + fmt(dil_m) + " <= 1e-10");
  const auto search = unistochastic_search(fixture);
  require(o, search.outcome == SearchOutcome::not_unistochastic && overlap_certificate(fx).has_value(),
          "fixture triangle certificate: " + to_string(search.outcome));
  require(o, !orthostochastic_check(fixture).orthogonal.has_value(), "fixture orthostochastic search NotFound");
  return o;
}

// ---- 6 -----------------------------------------------------------------

Outcome stone_extraction() {
  using namespace correspondence;
  Outcome o;
  random::Rng rng(6);
  double worst = 0.0;
  double min_ratio = INFINITY;
  for (int trial = 0; trial < 10; ++trial) {
    const sh::HermitianMatrix H(random::hermitian(4, rng));
    const sh::Propagator prop(H);
    const Evolution U = [&](double t) { return UnitaryMatrix(prop.unitary(t), t, 0.0); };
    auto err = [&](double dt) {
      return max_abs(ComplexMatrix(hamiltonian_from_evolution(U, 0.5, dt).H.matrix() - H.matrix()));
    };
    const double e = err(1e-4);
    worst = std::max(worst, e);
    min_ratio = std::min(min_ratio, e / err(5e-5));
  }
  require(o, worst <= 5e-6, "recovery err at dt=1e-4 " + fmt(worst) + " <= 5e-6");
  require(o, min_ratio >= 3.5, "min err ratio dt 1e-4 -> 5e-5 " + fmt(min_ratio) + " >= 3.5");
  return o;
}

// ---- 7 -----------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path data = STOCHQ_DATA_DIR;
  const fs::path dir = fs::temp_directory_path() / "stochq_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"embed", "harmonic_law.json"},
      {"sh-sim", "sigma_x.json"},
      {"divisibility", "qubit_process.json"},
      {"correspond", "identity_unitary.json"},
      {"unistochastic", "nonunistochastic3.json"},
      {"dilate", "nonunistochastic3.json"},
      {"extract-hamiltonian", "sigma_z.json"},
  };
  for (const auto& [cmd, file] : runs) {
    std::string files[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (cmd + "_" + std::to_string(k) + ".json");
      const std::string line = std::string(STOCHQ_CLI_BINARY) + " " + cmd + " --seed 42 --input " +
                               (data / file).string() + " --output " + out.string() + " 2>/dev/null";
      const int status = std::system(line.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) files[k] = "<exit " + std::to_string(status) + ">";
      else files[k] = slurp(out) + "\n--csv--\n" + slurp(fs::path(out).replace_extension(".csv"));
    }
    require(o, files[0] == files[1] && files[0].rfind("<exit", 0) != 0, cmd);
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "complex representation isomorphism", 1.0, complex_representation},
      {2, "Markovian embedding faithfulness", 5.0, markov_embedding},
      {3, "symplectic oscillator equivalence", 60.0, symplectic_equivalence},
      {4, "indivisibility witness", 30.0, indivisibility},
      {5, "correspondence round trips", 60.0, correspondence_round_trips},
      {6, "generator extraction", 10.0, stone_extraction},
      {7, "CLI determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0) require(o, secs < c.time_limit_s, "runtime " + fmt(secs) + " s < " + fmt(c.time_limit_s) + " s");
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    failures += !o.pass;
  }
  std::fflush(stdout);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
