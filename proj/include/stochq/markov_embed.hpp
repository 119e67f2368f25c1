#pragma once

#include "stochq/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace stochq::embed {

// Second-order deterministic law x(t+1) = F(x(t), x(t-1)) on the finite
// configuration space {first, ..., first + size - 1}.
struct SecondOrderDiscreteLaw {
  std::function<int(int, int)> F;
  int size = 1;
  int first = 1;

  bool contains(int c) const { return c >= first && c < first + size; }
};

// Point of the enlarged first-order state space C x C; y holds the previous x.
struct EmbeddedState {
  int x = 0;
  int y = 0;

  friend bool operator==(const EmbeddedState&, const EmbeddedState&) = default;
};

// (x, y) -> (F(x, y), x). Throws DomainError if either the input or F's
// output leaves the configuration space.
EmbeddedState step_discrete(const SecondOrderDiscreteLaw& law, EmbeddedState s);

// `steps` applications of step_discrete; the result includes s0 (steps + 1 entries).
std::vector<EmbeddedState> iterate_discrete(const SecondOrderDiscreteLaw& law,
                                            EmbeddedState s0, int steps);

struct MixedState {
  long X = 0;  // x + y
  long Y = 0;  // x - y

  friend bool operator==(const MixedState&, const MixedState&) = default;
};

std::vector<MixedState> xy_transform(const std::vector<EmbeddedState>& traj);
std::vector<EmbeddedState> xy_inverse(const std::vector<MixedState>& mixed);

// xdd = F(x, xd)
using SecondOrderODE = std::function<double(double, double)>;

struct Sample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};
using Trajectory = std::vector<Sample>;

// Classical RK4 for xd = y, yd = F(x, y). Uses ceil(T / dt) uniform steps of
// size T / steps (never larger than dt) so the last sample lands on T.
// First sample is (0, x0, v0).
Trajectory integrate_embedded(const SecondOrderODE& F, double x0, double v0, double dt, double T);

struct ComplexSample {
  double t = 0.0;
  Complex z;
};
using ComplexTrajectory = std::vector<ComplexSample>;

// calF(z, z*) = y + i F(x, y) with x = Re z, y = Im z.
Complex eval_complex_flow(const SecondOrderODE& F, Complex z);

// RK4 on zd = calF(z, z*), same step schedule as integrate_embedded.
ComplexTrajectory integrate_complex_flow(const SecondOrderODE& F, Complex z0, double dt, double T);

// t -> -t with x -> +x, y -> -y. Reverses sample order. An involution.
Trajectory time_reverse(const Trajectory& traj);

// z(t) -> K z(-t): conjugate and reverse.
ComplexTrajectory time_reverse(const ComplexTrajectory& traj);

// Max central-difference residual of xd = y and yd = F(x, y) over interior
// samples. Requires uniformly spaced samples.
double first_order_residual(const SecondOrderODE& F, const Trajectory& traj);
double first_order_residual(const SecondOrderODE& F, const ComplexTrajectory& traj);

struct ReversalCheck {
  bool invariant = false;
  double max_violation = 0.0;
};

inline constexpr double kReversalTolerance = 1e-12;
inline constexpr double kReversalBox = 10.0;

// Samples (x, y) uniformly in [-10, 10]^2 and reports max |F(x,-y) - F(x,y)|.
ReversalCheck check_time_reversal_invariance(const SecondOrderODE& F, int samples,
                                             std::uint64_t seed = 42);

}  // namespace stochq::embed
