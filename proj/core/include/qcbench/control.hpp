// control.hpp: piecewise constant control laws u(t) on [0, T].
#pragma once

#include <vector>

#include "qcbench/spectral.hpp"

namespace qcbench::prop {

// u(t) = values[i] on [breakpoints[i], breakpoints[i+1]). breakpoints are
// strictly increasing, start at 0, and there is exactly one more breakpoint
// than value. An empty control (breakpoints = {0}) acts over zero time.
struct PiecewiseConstantControl {
  std::vector<double> breakpoints{0.0};
  std::vector<double> values;

  PiecewiseConstantControl() = default;
  PiecewiseConstantControl(std::vector<double> breaks, std::vector<double> vals);

  std::size_t segments() const { return values.size(); }
  double duration() const { return breakpoints.back(); }

  // sum_i |u_i| (t_{i+1} - t_i)
  double l1_norm() const;

  // Value on the segment containing t; the final breakpoint belongs to the
  // last segment. Throws std::invalid_argument outside [0, duration].
  double value_at(double t) const;

  // True when every segment value lies in the admissible set.
  bool within(const spectral::ControlSet& set, double tol = 0.0) const;

  PiecewiseConstantControl scaled(double factor) const;

  // Appends another control after this one, shifting its breakpoints.
  void append(const PiecewiseConstantControl& tail);

  // This control repeated n times back to back.
  PiecewiseConstantControl tiled(int n) const;

  static PiecewiseConstantControl constant(double value, double duration);
};

// Midpoint sampler: freezes u at segment midpoints of a uniform grid of step
// dt over [0, duration] (last segment possibly shorter). Used to turn smooth
// waveforms into admissible piecewise constant controls.
PiecewiseConstantControl sample_midpoint(const std::function<double(double)>& u,
                                         double duration, double dt);

}  // namespace qcbench::prop
