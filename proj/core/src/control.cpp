#include "qcbench/control.hpp"

#include <cmath>
#include <stdexcept>

namespace qcbench::prop {

namespace {

void check_shape(const std::vector<double>& breaks, const std::vector<double>& vals) {
  if (breaks.empty() || breaks.front() != 0.0) {
    throw std::invalid_argument("control breakpoints must start at 0");
  }
  if (breaks.size() != vals.size() + 1) {
    throw std::invalid_argument("control needs exactly one more breakpoint than value");
  }
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) {
      throw std::invalid_argument("control breakpoints must strictly increase");
    }
  }
  for (double b : breaks) {
    if (!std::isfinite(b)) throw std::invalid_argument("non-finite breakpoint");
  }
  for (double v : vals) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite control value");
  }
}

}  // namespace

PiecewiseConstantControl::PiecewiseConstantControl(std::vector<double> breaks,
                                                   std::vector<double> vals)
    : breakpoints(std::move(breaks)), values(std::move(vals)) {
  check_shape(breakpoints, values);
}

double PiecewiseConstantControl::l1_norm() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += std::abs(values[i]) * (breakpoints[i + 1] - breakpoints[i]);
  }
  return acc;
}

double PiecewiseConstantControl::value_at(double t) const {
  if (values.empty() || t < 0.0 || t > duration()) {
    throw std::invalid_argument("time outside control domain");
  }
  // Binary search for the segment; ties at the last breakpoint fall into the
  // final segment.
  std::size_t lo = 0, hi = values.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi + 1) / 2;
    if (breakpoints[mid] <= t) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return values[lo];
}

bool PiecewiseConstantControl::within(const spectral::ControlSet& set, double tol) const {
  for (double v : values) {
    if (!set.contains(v, tol)) return false;
  }
  return true;
}

PiecewiseConstantControl PiecewiseConstantControl::scaled(double factor) const {
  if (!std::isfinite(factor)) throw std::invalid_argument("non-finite scale factor");
  PiecewiseConstantControl out = *this;
  for (double& v : out.values) v *= factor;
  return out;
}

void PiecewiseConstantControl::append(const PiecewiseConstantControl& tail) {
  double offset = duration();
  for (std::size_t i = 0; i < tail.values.size(); ++i) {
    breakpoints.push_back(offset + tail.breakpoints[i + 1]);
    values.push_back(tail.values[i]);
  }
}

PiecewiseConstantControl PiecewiseConstantControl::tiled(int n) const {
  if (n < 1) throw std::invalid_argument("tile count must be >= 1");
  PiecewiseConstantControl out;
  out.breakpoints.reserve(values.size() * n + 1);
  out.values.reserve(values.size() * n);
  double period = duration();
  for (int r = 0; r < n; ++r) {
    double offset = period * r;
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.breakpoints.push_back(offset + breakpoints[i + 1]);
      out.values.push_back(values[i]);
    }
  }
  return out;
}

PiecewiseConstantControl PiecewiseConstantControl::constant(double value, double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  return PiecewiseConstantControl({0.0, duration}, {value});
}

PiecewiseConstantControl sample_midpoint(const std::function<double(double)>& u,
                                         double duration, double dt) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("sampling step must be positive");
  std::vector<double> breaks{0.0};
  std::vector<double> vals;
  double t = 0.0;
  while (t < duration) {
    double next = std::min(t + dt, duration);
    // Guard against a sliver segment from accumulated rounding.
    if (duration - next < dt * 1e-9) next = duration;
    vals.push_back(u(0.5 * (t + next)));
    breaks.push_back(next);
    t = next;
  }
  return PiecewiseConstantControl(std::move(breaks), std::move(vals));
}

}  // namespace qcbench::prop
