// synth.hpp: resonant pulse design for level transfers. A transition (j,k) is
// driven by a periodic waveform at the gap frequency; first-order averaging of
// the rendered waveform fixes the full-transfer time and repetition count.
#pragma once

#include <vector>

#include "qcbench/control.hpp"
#include "qcbench/spectral.hpp"

namespace qcbench::synth {

using spectral::cplx;
using spectral::SystemPtr;

enum class PulseShape { cosine, square, tabulated };

// One period of a control waveform. The realized value is
//   cosine:    amplitude * cos(w0 t + phase)
//   square:    amplitude * sgn(cos(w0 t + phase))
//   tabulated: amplitude * table[i] held on the i-th of len(table) uniform
//              subintervals, with phase acting as a circular time shift,
// where w0 = 2 pi / period.
struct PeriodicPulse {
  PulseShape shape{PulseShape::cosine};
  double amplitude{1.0};
  double period{0.0};
  double phase{0.0};
  std::vector<double> table;  // tabulated shape only

  double value(double t) const;  // periodic in t
};

// |integral over one period of u(t) e^{i omega t} dt| / integral of |u|.
// Exact closed forms per shape; lies in [0,1]. Throws on a zero pulse or
// non-positive period.
double efficiency(const PeriodicPulse& pulse, double omega);

// integral of u(t) e^{i omega t} dt over a whole piecewise constant control,
// in closed form per segment.
cplx resonant_integral(const prop::PiecewiseConstantControl& u, double omega);

// Zero-order-hold rendering of one pulse period on a uniform grid
// (values frozen at subinterval midpoints).
prop::PiecewiseConstantControl render(const PeriodicPulse& pulse, int steps_per_period);

// First steps of a control up to t_end (final segment split as needed).
prop::PiecewiseConstantControl truncated(const prop::PiecewiseConstantControl& u,
                                         double t_end);

// Another coupled pair (l, m) whose gap sits on an integer harmonic q >= 1 of
// the designed transition's gap.
struct Collision {
  int l{0}, m{0};
  int harmonic{0};
  double gap{0.0};
};

// Scans coupled pairs l < m <= N, excluding {j,k} itself. Gap comparison is
// relative: |gap_lm - q*base| <= rel_tol * gap_lm.
std::vector<Collision> resonance_collisions(const SystemPtr& sys, int j, int k,
                                            int N, double rel_tol = 1e-9);

struct DesignOptions {
  int steps_per_period{64};
  double phase{0.0};
  int collision_scan{24};      // depth N for the collision warning scan
  std::vector<double> table;   // tabulated shape only
};

struct TransferDesign {
  int from{0}, to{0};
  PulseShape shape{PulseShape::cosine};
  double amplitude{0.0};
  double period{0.0};
  double rendered_efficiency{0.0};  // of the emitted waveform at the gap
  double t_pi{0.0};                 // first-order full-transfer time
  int repetitions{0};               // ceil(t_pi / period)
  double predicted_fidelity{0.0};   // sin^2 of the realized rotation
  double l1{0.0};
  prop::PiecewiseConstantControl control;
  std::vector<Collision> collision_warnings;  // at shape-active harmonics only
};

// Designs a resonant transfer pulse for (j,k). Requires b_jk != 0, a positive
// amplitude admissible for the system's control set, and j != k.
TransferDesign design_transfer(const SystemPtr& sys, int j, int k,
                               double amplitude, PulseShape shape,
                               const DesignOptions& opt = {});

struct LadderSchedule {
  int target{0};
  std::vector<TransferDesign> legs;      // (1,2), (2,3), ..., (m-1,m)
  std::vector<double> leg_start_times;
  prop::PiecewiseConstantControl control;  // legs concatenated
  double total_l1{0.0};
  double l1_budget{0.0};  // (5 pi / 4) * sum_j 1/|b_{j,j+1}|
};

// Chains consecutive transfers up to the target level. Throws when some
// consecutive coupling vanishes (broken chain).
LadderSchedule ladder_schedule(const SystemPtr& sys, int target, double amplitude,
                               PulseShape shape, const DesignOptions& opt = {});

struct ScalingRow {
  int n{0};
  double fidelity{0.0};  // |<phi_to, x(horizon)>|
  double horizon{0.0};
};

// Shared setup of a scaling experiment: the base design at the full
// amplitude, its rendered one-period waveform, and the per-unit horizon T*
// fixed by the design at amplitude/n_max.
struct ScalingPlan {
  SystemPtr sys;
  TransferDesign base;
  prop::PiecewiseConstantControl one_period;
  double unit_horizon{0.0};
};

ScalingPlan amplitude_scaling_plan(const SystemPtr& sys, int j, int k,
                                   double amplitude, PulseShape shape, int n_max,
                                   const DesignOptions& opt = {});

// One row: the base pulse scaled by 1/n, run over horizon n*T* at the given
// truncation order. Rows are independent and safe to run concurrently.
ScalingRow scaling_row(const ScalingPlan& plan, int n, int order);

struct ScalingExperiment {
  ScalingPlan plan;
  std::vector<ScalingRow> rows;
};

// Runs the pulse scaled by 1/n over horizon n*T* for each n, where T* is the
// per-unit horizon of the largest-n design. Fidelities approach 1 as n grows
// when no shape-active collision interferes.
ScalingExperiment amplitude_scaling_experiment(const SystemPtr& sys, int j, int k,
                                               double amplitude, PulseShape shape,
                                               const std::vector<int>& n_list,
                                               int order,
                                               const DesignOptions& opt = {});

}  // namespace qcbench::synth
