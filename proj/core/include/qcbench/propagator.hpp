// propagator.hpp: exact piecewise-constant evolution of compressed systems.
// Each constant segment is advanced through the eigendecomposition of the
// Hermitian generator H_u, reused across repeated control values.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

#include "qcbench/control.hpp"
#include "qcbench/galerkin.hpp"

namespace qcbench::prop {

using galerkin::Compression;
using spectral::cplx;

// Sampled evolution on a time grid containing every control breakpoint.
// states[i] is the coefficient vector at times[i]; cumulative_l1[i] is
// the integral of |u| over [0, times[i]].
struct Trajectory {
  int order{0};
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  std::vector<double> cumulative_l1;
  double control_l1{0.0};

  std::size_t samples() const { return times.size(); }
  double population(std::size_t sample, int level) const;  // level is 1-based
  double norm_at(std::size_t sample) const;
};

// Callback invoked at every emitted sample, including t = 0.
using StepObserver =
    std::function<void(double t, const Eigen::VectorXcd& state, double l1_so_far)>;

inline constexpr double kBreakpointsOnly = std::numeric_limits<double>::infinity();

// Core engine: advances psi0 under u, emitting samples at every breakpoint
// plus intermediate points every sample_dt inside segments. Nothing is
// stored; use this for long schedules. Requires a unit psi0 (1e-10) and
// sample_dt > 0. Returns the terminal state.
Eigen::VectorXcd propagate_observe(const Compression& comp,
                                   const PiecewiseConstantControl& u,
                                   const Eigen::VectorXcd& psi0,
                                   double sample_dt, const StepObserver& observer);

// Stored-trajectory front end over propagate_observe.
Trajectory propagate(const Compression& comp, const PiecewiseConstantControl& u,
                     const Eigen::VectorXcd& psi0,
                     double sample_dt = kBreakpointsOnly);

// Terminal state only.
Eigen::VectorXcd propagate_final(const Compression& comp,
                                 const PiecewiseConstantControl& u,
                                 const Eigen::VectorXcd& psi0);

// Freezes a continuous control at midpoints of a uniform grid of step dt
// (zero-order hold), then propagates. The trajectory's control_l1 is the
// sampled control's norm. duration = 0 yields the single-point trajectory.
Trajectory propagate_sampled(const Compression& comp,
                             const std::function<double(double)>& u,
                             double duration, double dt,
                             const Eigen::VectorXcd& psi0);

// Full propagator matrix: the ordered product of segment exponentials
// exp(dt_p (A + u_p B)) ... exp(dt_1 (A + u_1 B)). Identity for an empty
// control. Unitary to roundoff.
Eigen::MatrixXcd propagator_matrix(const Compression& comp,
                                   const PiecewiseConstantControl& u);

}  // namespace qcbench::prop
