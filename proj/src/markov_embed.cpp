#include "stochq/markov_embed.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace stochq::embed {

EmbeddedState step_discrete(const SecondOrderDiscreteLaw& law, EmbeddedState s) {
  if (!law.contains(s.x) || !law.contains(s.y)) {
    throw DomainError("state (" + std::to_string(s.x) + ", " + std::to_string(s.y) +
                      ") outside configuration space");
  }
  const int next = law.F(s.x, s.y);
  if (!law.contains(next)) {
    throw DomainError("law produced configuration " + std::to_string(next) +
                      " outside configuration space");
  }
  return {next, s.x};
}

std::vector<EmbeddedState> iterate_discrete(const SecondOrderDiscreteLaw& law,
                                            EmbeddedState s0, int steps) {
  std::vector<EmbeddedState> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0)) + 1);
  out.push_back(s0);
  for (int k = 0; k < steps; ++k) out.push_back(step_discrete(law, out.back()));
  return out;
}

std::vector<MixedState> xy_transform(const std::vector<EmbeddedState>& traj) {
  std::vector<MixedState> out;
  out.reserve(traj.size());
  for (const auto& s : traj) out.push_back({long{s.x} + s.y, long{s.x} - s.y});
  return out;
}

std::vector<EmbeddedState> xy_inverse(const std::vector<MixedState>& mixed) {
  std::vector<EmbeddedState> out;
  out.reserve(mixed.size());
  // X + Y = 2x and X - Y = 2y are even by construction.
  for (const auto& m : mixed) {
    out.push_back({static_cast<int>((m.X + m.Y) / 2), static_cast<int>((m.X - m.Y) / 2)});
  }
  return out;
}

namespace {

struct Schedule {
  long steps;
  double h;
};

Schedule make_schedule(double dt, double T) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive", "dt");
  if (!(T >= dt)) throw ValidationError("T must be at least dt", "T");
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  return {steps, T / static_cast<double>(steps)};
}

double checked(double v, long step) {
  if (!std::isfinite(v)) throw IntegrationError("non-finite force", step);
  return v;
}

}  // namespace

Trajectory integrate_embedded(const SecondOrderODE& F, double x0, double v0, double dt, double T) {
  const auto [steps, h] = make_schedule(dt, T);
  Trajectory out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back({0.0, x0, v0});
  double x = x0;
  double y = v0;
  for (long k = 0; k < steps; ++k) {
    const double k1x = y;
    const double k1y = checked(F(x, y), k);
    const double k2x = y + 0.5 * h * k1y;
    const double k2y = checked(F(x + 0.5 * h * k1x, y + 0.5 * h * k1y), k);
    const double k3x = y + 0.5 * h * k2y;
    const double k3y = checked(F(x + 0.5 * h * k2x, y + 0.5 * h * k2y), k);
    const double k4x = y + h * k3y;
    const double k4y = checked(F(x + h * k3x, y + h * k3y), k);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    out.push_back({static_cast<double>(k + 1) * h, x, y});
  }
  return out;
}

Complex eval_complex_flow(const SecondOrderODE& F, Complex z) {
  return {z.imag(), F(z.real(), z.imag())};
}

ComplexTrajectory integrate_complex_flow(const SecondOrderODE& F, Complex z0, double dt, double T) {
  const auto [steps, h] = make_schedule(dt, T);
  ComplexTrajectory out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back({0.0, z0});
  Complex z = z0;
  auto flow = [&](Complex w, long k) {
    const Complex f = eval_complex_flow(F, w);
    checked(f.imag(), k);
    return f;
  };
  for (long k = 0; k < steps; ++k) {
    const Complex k1 = flow(z, k);
    const Complex k2 = flow(z + 0.5 * h * k1, k);
    const Complex k3 = flow(z + 0.5 * h * k2, k);
    const Complex k4 = flow(z + h * k3, k);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back({static_cast<double>(k + 1) * h, z});
  }
  return out;
}

// Adding +0.0 turns -0.0 into +0.0 and leaves every other value untouched,
// so reversing twice is bit-exact.
Trajectory time_reverse(const Trajectory& traj) {
  Trajectory out(traj.rbegin(), traj.rend());
  for (auto& s : out) {
    s.t = -s.t + 0.0;
    s.y = -s.y;
  }
  return out;
}

ComplexTrajectory time_reverse(const ComplexTrajectory& traj) {
  ComplexTrajectory out(traj.rbegin(), traj.rend());
  for (auto& s : out) {
    s.t = -s.t + 0.0;
    s.z = std::conj(s.z);
  }
  return out;
}

double first_order_residual(const SecondOrderODE& F, const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double span = traj[k + 1].t - traj[k - 1].t;
    const double xd = (traj[k + 1].x - traj[k - 1].x) / span;
    const double yd = (traj[k + 1].y - traj[k - 1].y) / span;
    worst = std::max({worst, std::abs(xd - traj[k].y), std::abs(yd - F(traj[k].x, traj[k].y))});
  }
  return worst;
}

double first_order_residual(const SecondOrderODE& F, const ComplexTrajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double span = traj[k + 1].t - traj[k - 1].t;
    const Complex zd = (traj[k + 1].z - traj[k - 1].z) / span;
    worst = std::max(worst, std::abs(zd - eval_complex_flow(F, traj[k].z)));
  }
  return worst;
}

ReversalCheck check_time_reversal_invariance(const SecondOrderODE& F, int samples,
                                             std::uint64_t seed) {
  if (samples < 1) throw ValidationError("samples must be >= 1", "samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-kReversalBox, kReversalBox);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = box(rng);
    const double y = box(rng);
    worst = std::max(worst, std::abs(F(x, -y) - F(x, y)));
  }
  return {worst <= kReversalTolerance, worst};
}

}  // namespace stochq::embed
