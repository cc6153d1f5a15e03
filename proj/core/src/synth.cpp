#include "qcbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcbench/propagator.hpp"

namespace qcbench::synth {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// integral of e^{i a t} over [t1, t2]
cplx phase_integral(double a, double t1, double t2) {
  if (std::abs(a) * (t2 - t1) < 1e-14) return cplx{t2 - t1, 0.0};
  return (std::exp(kI * a * t2) - std::exp(kI * a * t1)) / (kI * a);
}

void check_pulse(const PeriodicPulse& p) {
  if (!(p.period > 0.0)) throw std::invalid_argument("pulse period must be positive");
  if (!(p.amplitude > 0.0)) throw std::invalid_argument("pulse amplitude must be positive");
  if (p.shape == PulseShape::tabulated) {
    if (p.table.empty()) throw std::invalid_argument("tabulated pulse needs samples");
    bool all_zero = true;
    for (double v : p.table) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite pulse sample");
      if (v != 0.0) all_zero = false;
    }
    if (all_zero) throw std::invalid_argument("tabulated pulse is identically zero");
  }
}

// Constant-value spans of one pulse period, for the square and tabulated
// shapes (the cosine shape is handled analytically).
std::vector<std::pair<std::pair<double, double>, double>> period_segments(
    const PeriodicPulse& p) {
  std::vector<std::pair<std::pair<double, double>, double>> segs;
  double T = p.period;
  double w0 = 2.0 * kPi / T;
  if (p.shape == PulseShape::square) {
    // sign flips of cos(w0 t + phase) at w0 t + phase = pi/2 + q pi
    std::vector<double> cuts{0.0, T};
    double first = (kPi / 2.0 - p.phase) / w0;
    first -= std::floor(first / (T / 2.0)) * (T / 2.0);
    for (double t = first; t < T; t += T / 2.0) {
      if (t > 0.0 && t < T) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] < T * 1e-15) continue;
      double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      double s = std::cos(w0 * mid + p.phase) >= 0.0 ? 1.0 : -1.0;
      segs.push_back({{cuts[i], cuts[i + 1]}, p.amplitude * s});
    }
  } else {
    // Tabulated: uniform grid circularly shifted by the phase.
    std::size_t L = p.table.size();
    double dt = T / double(L);
    double shift = p.phase / w0;
    shift -= std::floor(shift / T) * T;
    std::vector<double> cicuts{0.0, T};
    for (std::size_t i = 0; i < L; ++i) {
      double t = double(i) * dt - shift;
      t -= std::floor(t / T) * T;
      if (t > 0.0 && t < T) cicuts.push_back(t);
    }
    std::sort(cicuts.begin(), cicuts.end());
    for (std::size_t i = 0; i + 1 < cicuts.size(); ++i) {
      if (cicuts[i + 1] - cicuts[i] < T * 1e-15) continue;
      double mid = 0.5 * (cicuts[i] + cicuts[i + 1]);
      double pos = (mid + shift) / T;
      pos -= std::floor(pos);
      auto idx = std::min<std::size_t>(L - 1, std::size_t(pos * double(L)));
      segs.push_back({{cicuts[i], cicuts[i + 1]}, p.amplitude * p.table[idx]});
    }
  }
  return segs;
}

}  // namespace

double PeriodicPulse::value(double t) const {
  double w0 = 2.0 * kPi / period;
  switch (shape) {
    case PulseShape::cosine:
      return amplitude * std::cos(w0 * t + phase);
    case PulseShape::square:
      return amplitude * (std::cos(w0 * t + phase) >= 0.0 ? 1.0 : -1.0);
    case PulseShape::tabulated: {
      double pos = (t + phase / w0) / period;
      pos -= std::floor(pos);
      auto idx = std::min<std::size_t>(table.size() - 1,
                                       std::size_t(pos * double(table.size())));
      return amplitude * table[idx];
    }
  }
  return 0.0;
}

double efficiency(const PeriodicPulse& pulse, double omega) {
  check_pulse(pulse);
  if (!std::isfinite(omega)) throw std::invalid_argument("non-finite frequency");
  double T = pulse.period;
  double w0 = 2.0 * kPi / T;

  double num, den;
  if (pulse.shape == PulseShape::cosine) {
    // cos(w0 t + phase) = (e^{i(w0 t + phase)} + c.c.)/2
    cplx integral = 0.5 * (std::exp(kI * pulse.phase) * phase_integral(omega + w0, 0.0, T) +
                           std::exp(-kI * pulse.phase) * phase_integral(omega - w0, 0.0, T));
    num = pulse.amplitude * std::abs(integral);
    den = pulse.amplitude * 4.0 / w0;  // integral of |cos| over a full period
  } else {
    cplx integral{0.0, 0.0};
    den = 0.0;
    for (const auto& [span, v] : period_segments(pulse)) {
      integral += v * phase_integral(omega, span.first, span.second);
      den += std::abs(v) * (span.second - span.first);
    }
    if (den <= 0.0) throw std::invalid_argument("pulse has zero total variation");
    num = std::abs(integral);
  }
  return num / den;
}

cplx resonant_integral(const prop::PiecewiseConstantControl& u, double omega) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    acc += u.values[i] * phase_integral(omega, u.breakpoints[i], u.breakpoints[i + 1]);
  }
  return acc;
}

prop::PiecewiseConstantControl render(const PeriodicPulse& pulse, int steps_per_period) {
  check_pulse(pulse);
  if (steps_per_period < 1) throw std::invalid_argument("steps_per_period must be >= 1");
  std::vector<double> breaks(steps_per_period + 1);
  std::vector<double> vals(steps_per_period);
  double dt = pulse.period / steps_per_period;
  for (int i = 0; i <= steps_per_period; ++i) breaks[i] = i * dt;
  breaks.back() = pulse.period;
  for (int i = 0; i < steps_per_period; ++i) {
    vals[i] = pulse.value((i + 0.5) * dt);
  }
  return prop::PiecewiseConstantControl(std::move(breaks), std::move(vals));
}

prop::PiecewiseConstantControl truncated(const prop::PiecewiseConstantControl& u,
                                         double t_end) {
  if (!(t_end > 0.0) || t_end > u.duration() * (1.0 + 1e-12)) {
    throw std::invalid_argument("truncation time outside control domain");
  }
  std::vector<double> breaks{0.0};
  std::vector<double> vals;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    double hi = u.breakpoints[i + 1];
    if (hi >= t_end) {
      if (t_end - u.breakpoints[i] > 0.0) {
        breaks.push_back(t_end);
        vals.push_back(u.values[i]);
      }
      break;
    }
    breaks.push_back(hi);
    vals.push_back(u.values[i]);
  }
  return prop::PiecewiseConstantControl(std::move(breaks), std::move(vals));
}

std::vector<Collision> resonance_collisions(const SystemPtr& sys, int j, int k,
                                            int N, double rel_tol) {
  if (!sys) throw std::invalid_argument("null system");
  if (j == k) throw std::invalid_argument("transition needs distinct levels");
  sys->require_level(std::max(j, k));
  sys->require_level(N);
  double base = std::abs(sys->eigenvalue(j) - sys->eigenvalue(k));
  if (!(base > 0.0)) throw std::invalid_argument("transition gap vanishes");

  int lo = std::min(j, k), hi = std::max(j, k);
  std::vector<Collision> out;
  for (int l = 1; l <= N; ++l) {
    for (int m = l + 1; m <= N; ++m) {
      if (l == lo && m == hi) continue;
      if (std::abs(sys->coupling(l, m)) == 0.0) continue;
      double gap = std::abs(sys->eigenvalue(l) - sys->eigenvalue(m));
      int q = int(std::lround(gap / base));
      if (q < 1) continue;
      if (std::abs(gap - q * base) <= rel_tol * gap) {
        out.push_back({l, m, q, gap});
      }
    }
  }
  return out;
}

TransferDesign design_transfer(const SystemPtr& sys, int j, int k,
                               double amplitude, PulseShape shape,
                               const DesignOptions& opt) {
  if (!sys) throw std::invalid_argument("null system");
  if (j == k) throw std::invalid_argument("transition needs distinct levels");
  sys->require_level(std::max(j, k));
  if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");

  double b_abs = std::abs(sys->coupling(j, k));
  if (b_abs == 0.0) {
    throw std::invalid_argument("levels " + std::to_string(j) + " and " +
                                std::to_string(k) + " are not directly coupled");
  }

  double gap = std::abs(sys->eigenvalue(j) - sys->eigenvalue(k));
  TransferDesign d;
  d.from = j;
  d.to = k;
  d.shape = shape;
  d.amplitude = amplitude;
  d.period = 2.0 * kPi / gap;

  PeriodicPulse pulse{shape, amplitude, d.period, opt.phase, opt.table};
  auto one_period = render(pulse, opt.steps_per_period);
  if (!one_period.within(sys->control_set)) {
    throw std::invalid_argument("pulse values leave the admissible control set");
  }

  double weight = std::abs(resonant_integral(one_period, gap));
  double l1pp = one_period.l1_norm();
  if (!(weight > 0.0) || !(l1pp > 0.0)) {
    throw std::invalid_argument("pulse has no resonant component at the gap frequency");
  }
  d.rendered_efficiency = weight / l1pp;

  // First-order averaging: the transition rotates at |b_jk| * weight / period,
  // so a half turn (full transfer) takes t_pi below. The cosine shape
  // reproduces t_pi = pi / (amplitude |b_jk|) up to rendering.
  double rate = b_abs * weight / d.period;
  d.t_pi = 0.5 * kPi / rate;
  d.repetitions = int(std::ceil(d.t_pi / d.period * (1.0 - 1e-12)));
  d.control = one_period.tiled(d.repetitions);
  d.l1 = d.control.l1_norm();
  double rotation = rate * d.repetitions * d.period;
  double s = std::sin(rotation);
  d.predicted_fidelity = s * s;

  int scan = std::max(opt.collision_scan, std::max(j, k));
  if (sys->max_order) scan = std::min(scan, *sys->max_order);
  for (const Collision& c : resonance_collisions(sys, j, k, scan)) {
    bool active = false;
    switch (shape) {
      case PulseShape::cosine:
        active = c.harmonic == 1;
        break;
      case PulseShape::square:
        active = c.harmonic % 2 == 1;
        break;
      case PulseShape::tabulated: {
        double wq = std::abs(resonant_integral(one_period, c.harmonic * gap));
        active = wq > 1e-12 * l1pp;
        break;
      }
    }
    if (active) d.collision_warnings.push_back(c);
  }
  return d;
}

LadderSchedule ladder_schedule(const SystemPtr& sys, int target, double amplitude,
                               PulseShape shape, const DesignOptions& opt) {
  if (target < 2) throw std::invalid_argument("ladder target must be >= 2");
  LadderSchedule s;
  s.target = target;
  for (int j = 1; j + 1 <= target; ++j) {
    if (std::abs(sys->coupling(j, j + 1)) == 0.0) {
      throw std::invalid_argument("ladder chain broken: levels " + std::to_string(j) +
                                  " and " + std::to_string(j + 1) + " uncoupled");
    }
    s.leg_start_times.push_back(s.control.duration());
    TransferDesign leg = design_transfer(sys, j, j + 1, amplitude, shape, opt);
    s.control.append(leg.control);
    s.l1_budget += (5.0 * kPi / 4.0) / std::abs(sys->coupling(j, j + 1));
    s.legs.push_back(std::move(leg));
  }
  s.total_l1 = s.control.l1_norm();
  return s;
}

ScalingPlan amplitude_scaling_plan(const SystemPtr& sys, int j, int k,
                                   double amplitude, PulseShape shape, int n_max,
                                   const DesignOptions& opt) {
  if (n_max < 1) throw std::invalid_argument("scaling factors must be >= 1");

  ScalingPlan plan;
  plan.sys = sys;
  plan.base = design_transfer(sys, j, k, amplitude, shape, opt);
  plan.one_period = render(
      PeriodicPulse{shape, amplitude, plan.base.period, opt.phase, opt.table},
      opt.steps_per_period);

  // Design at the weakest amplitude fixes the common per-unit horizon T*.
  TransferDesign weakest =
      design_transfer(sys, j, k, amplitude / n_max, shape, opt);
  plan.unit_horizon = weakest.repetitions * weakest.period / double(n_max);
  return plan;
}

ScalingRow scaling_row(const ScalingPlan& plan, int n, int order) {
  if (n < 1) throw std::invalid_argument("scaling factors must be >= 1");
  if (order < plan.base.from || order < plan.base.to) {
    throw std::invalid_argument("truncation order excludes a transfer level");
  }
  auto comp = galerkin::compress(plan.sys, order);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(order);
  psi0(plan.base.from - 1) = 1.0;

  double horizon = n * plan.unit_horizon;
  int periods = int(std::ceil(horizon / plan.base.period - 1e-12));
  auto u = truncated(plan.one_period.scaled(1.0 / n).tiled(periods), horizon);
  Eigen::VectorXcd xT = prop::propagate_final(comp, u, psi0);
  return {n, std::abs(xT(plan.base.to - 1)), horizon};
}

ScalingExperiment amplitude_scaling_experiment(const SystemPtr& sys, int j, int k,
                                               double amplitude, PulseShape shape,
                                               const std::vector<int>& n_list,
                                               int order,
                                               const DesignOptions& opt) {
  if (n_list.empty()) throw std::invalid_argument("empty scaling list");
  int n_max = *std::max_element(n_list.begin(), n_list.end());

  ScalingExperiment ex;
  ex.plan = amplitude_scaling_plan(sys, j, k, amplitude, shape, n_max, opt);
  for (int n : n_list) ex.rows.push_back(scaling_row(ex.plan, n, order));
  return ex;
}

}  // namespace qcbench::synth
