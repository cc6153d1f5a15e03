// Acceptance gate: twelve numbered end-to-end checks covering the published
// quantitative claims (truncation order, coupling tables, unitarity, pulse
// transfers, norm/energy/cost inequalities, degeneracy structure, ladder
// climbing, Galerkin convergence). Prints one [PASS]/[FAIL] line per check
// and exits nonzero when any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcbench/diagnostics.hpp"
#include "qcbench/galerkin.hpp"
#include "qcbench/propagator.hpp"
#include "qcbench/spectral.hpp"
#include "qcbench/synth.hpp"

using namespace qcbench;
using spectral::cplx;

namespace {

// --------------------------------------------------------------- registry
// Every trajectory this suite produces is streamed through the control-cost
// lower bound: at each sample, population movement on any level, divided by
// that level's coupling column norm, must not exceed the control effort so
// far. The worst margin across the whole suite feeds check 7.

struct CostRegistry {
  double worst_excess = -std::numeric_limits<double>::infinity();
  long samples = 0;
  int runs = 0;
} g_cost;

Eigen::VectorXd column_norms(const galerkin::Compression& comp) {
  Eigen::VectorXd c(comp.order);
  for (int n = 0; n < comp.order; ++n) c(n) = comp.coupling.col(n).norm();
  return c;
}

// Streaming propagation: records the cost margin at every sample without
// storing the trajectory. Returns the terminal state.
Eigen::VectorXcd tracked_final(const galerkin::Compression& comp,
                               const prop::PiecewiseConstantControl& u,
                               const Eigen::VectorXcd& psi0,
                               double sample_dt = prop::kBreakpointsOnly) {
  Eigen::VectorXd cols = column_norms(comp);
  Eigen::VectorXd mod0 = psi0.cwiseAbs();
  g_cost.runs += 1;
  return prop::propagate_observe(
      comp, u, psi0, sample_dt,
      [&](double, const Eigen::VectorXcd& x, double l1) {
        g_cost.samples += 1;
        for (int n = 0; n < comp.order; ++n) {
          double movement = std::abs(mod0(n) - std::abs(x(n)));
          double excess;
          if (cols(n) < 1e-300) {
            excess = movement > 1e-9
                         ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
          } else {
            excess = movement / cols(n) - l1;
          }
          g_cost.worst_excess = std::max(g_cost.worst_excess, excess);
        }
      });
}

Eigen::VectorXcd basis_state(int N, int level) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
  x(level - 1) = 1.0;
  return x;
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

// --------------------------------------------------------------- criteria

bool c01_truncation_formula(std::string& note) {
  auto n = galerkin::harmonic_truncation_order(3.0, 1e-4);
  std::ostringstream os;
  os << "harmonic ladder K=3 eps=1e-4 -> N="
     << (n ? std::to_string(*n) : std::string("none"));
  note = os.str();
  return n && *n == 413;
}

bool c02_coupling_tables(std::string& note) {
  double worst = 0.0;
  std::string where;
  auto track = [&](const char* name, int j, int k, double err) {
    if (err > worst) {
      worst = err;
      where = std::string(name) + "(" + std::to_string(j) + "," +
              std::to_string(k) + ")";
    }
  };

  auto well = spectral::make_square_well();
  double scale =
      well->coupling(1, 2).real() / oracle::square_well_position_element(1, 2);
  auto harm = spectral::make_harmonic();
  auto rotor = spectral::make_planar_rotor();
  auto anh = spectral::make_anharmonic(3.0);
  for (int j = 1; j <= 30; ++j) {
    for (int k = 1; k <= 30; ++k) {
      track("square-well", j, k,
            std::abs(well->coupling(j, k).real() -
                     scale * oracle::square_well_position_element(j, k)));
      track("harmonic", j, k,
            std::abs(harm->coupling(j, k) -
                     cplx{0.0, -1.0} * oracle::hermite_position_element(j, k)));
      track("planar-rotor", j, k,
            std::abs(rotor->coupling(j, k) -
                     cplx{0.0, -1.0} * oracle::rotor_cos_element(j, k)));
      track("anharmonic", j, k,
            std::abs(anh->coupling(j, k) -
                     cplx{0.0, -1.0} * oracle::anharmonic_x4_quadrature(j, k)));
    }
  }
  std::ostringstream os;
  os << "worst |table - oracle| = " << worst << " at " << where
     << " (well scale " << scale << ")";
  note = os.str();
  return worst < 1e-8;
}

bool c03_unitarity(std::string& note) {
  std::mt19937 rng(20240311);
  std::uniform_int_distribution<int> pick_system(0, 3);
  std::uniform_int_distribution<int> pick_order(2, 24);
  std::uniform_int_distribution<int> pick_segments(1, 6);
  std::uniform_real_distribution<double> pick_value(-1.0, 1.0);
  std::uniform_real_distribution<double> pick_dt(0.05, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const std::vector<spectral::SystemPtr> systems{
      spectral::make_square_well(), spectral::make_harmonic(),
      spectral::make_planar_rotor(), spectral::make_anharmonic(2.0)};

  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& sys = systems[std::size_t(pick_system(rng))];
    int N = pick_order(rng);
    auto comp = galerkin::compress(sys, N);

    int segs = pick_segments(rng);
    std::vector<double> breaks{0.0}, vals;
    for (int s = 0; s < segs; ++s) {
      breaks.push_back(breaks.back() + pick_dt(rng));
      vals.push_back(pick_value(rng));
    }
    prop::PiecewiseConstantControl u(std::move(breaks), std::move(vals));

    Eigen::VectorXcd psi0(N);
    for (int i = 0; i < N; ++i) psi0(i) = cplx{unit(rng), unit(rng)};
    psi0 /= psi0.norm();

    prop::propagate_observe(comp, u, psi0, 0.25,
                            [&](double, const Eigen::VectorXcd& x, double) {
                              worst = std::max(worst, std::abs(x.norm() - 1.0));
                            });
  }
  std::ostringstream os;
  os << "1000 randomized runs, worst | ||x||-1 | = " << worst;
  note = os.str();
  return worst < 1e-9;
}

bool c04_well_transfer(std::string& note) {
  auto well = spectral::make_square_well();
  // Fine rendering keeps the zero-order-hold spectral images (at 512 w0 +- w0)
  // above every transition gap representable at order 20; at 64 steps the
  // image at 97.5 resonantly pumps the coupled pair (1,14).
  synth::DesignOptions opt;
  opt.steps_per_period = 512;
  auto d = synth::design_transfer(well, 1, 2, 0.01, synth::PulseShape::cosine, opt);
  auto c20 = galerkin::compress(well, 20);
  auto c10 = galerkin::compress(well, 10);
  Eigen::VectorXcd x20 = tracked_final(c20, d.control, basis_state(20, 1));
  Eigen::VectorXcd x10 = tracked_final(c10, d.control, basis_state(10, 1));
  double pop2 = std::norm(x20(1));
  Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(20);
  padded.head(10) = x10;
  double gap = (padded - x20).norm();
  std::ostringstream os;
  os << "population(2) = " << pop2 << ", |x10 - x20| = " << gap;
  note = os.str();
  return pop2 >= 0.99 && gap <= 1e-6;
}

bool c05_amplitude_scaling(std::string& note) {
  auto rotor = spectral::make_planar_rotor();
  auto plan = synth::amplitude_scaling_plan(rotor, 1, 2, 0.2,
                                            synth::PulseShape::cosine, 8);
  auto comp = galerkin::compress(rotor, 12);
  std::vector<double> fids;
  for (int n : {1, 2, 4, 8}) {
    // same row construction as the library experiment, routed through the
    // cost registry
    double horizon = n * plan.unit_horizon;
    int periods = int(std::ceil(horizon / plan.base.period - 1e-12));
    auto u = synth::truncated(plan.one_period.scaled(1.0 / n).tiled(periods),
                              horizon);
    Eigen::VectorXcd xT = tracked_final(comp, u, basis_state(12, 1));
    fids.push_back(std::abs(xT(1)));
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < fids.size(); ++i) {
    if (fids[i + 1] < fids[i] - 1e-3) monotone = false;
  }
  std::ostringstream os;
  os << "fidelities";
  for (double f : fids) os << " " << f;
  note = os.str();
  return monotone && fids.back() >= 0.999;
}

bool c06_l1_upper_bound(std::string& note) {
  auto rotor = spectral::make_planar_rotor();
  auto d = synth::design_transfer(rotor, 1, 2, 0.1, synth::PulseShape::cosine);
  auto comp = galerkin::compress(rotor, 12);
  Eigen::VectorXcd xT = tracked_final(comp, d.control, basis_state(12, 1));
  double pop2 = std::norm(xT(1));
  double budget = 1.10 * (5.0 * M_PI / 4.0) / 0.5;
  std::ostringstream os;
  os << "population(2) = " << pop2 << ", L1 = " << d.l1 << " vs " << budget;
  note = os.str();
  return pop2 >= 0.99 && d.l1 <= budget;
}

bool c07_global_cost_margin(std::string& note) {
  std::ostringstream os;
  os << "worst excess " << g_cost.worst_excess << " over " << g_cost.samples
     << " samples in " << g_cost.runs << " runs";
  note = os.str();
  return g_cost.runs > 0 && g_cost.worst_excess <= 1e-6;
}

bool c08_norm_growth(std::string& note) {
  auto rotor = spectral::make_planar_rotor();
  auto harm = spectral::make_harmonic();
  // declared constants must match the published bounds
  if (!rotor->known_coupling_bound || !harm->known_coupling_bound) {
    note = "missing declared coupling bound";
    return false;
  }
  for (int k : {1, 2}) {
    double rotor_ck = (std::pow(2.0, 2 * k) - 1.0) / 2.0;
    double harm_ck = std::pow(3.0, k) - 1.0;
    if (std::abs(rotor->known_coupling_bound(k) - rotor_ck) > 1e-12 ||
        std::abs(harm->known_coupling_bound(k) - harm_ck) > 1e-12) {
      note = "declared coupling bound mismatch";
      return false;
    }
  }

  int ran = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  auto run = [&](const spectral::SystemPtr& sys, int from, int to, double amp,
                 int order) -> bool {
    auto d = synth::design_transfer(sys, from, to, amp, synth::PulseShape::cosine);
    auto comp = galerkin::compress(sys, order);
    auto traj = prop::propagate(comp, d.control, basis_state(order, from));
    auto r = diag::check_l1_lower_bound(comp, traj);
    if (r.verdict != diag::Verdict::pass) return false;
    g_cost.runs += 1;  // counted toward the global margin via the library check
    g_cost.samples += long(traj.samples());
    g_cost.worst_excess = std::max(g_cost.worst_excess, r.measured);
    for (int s : {1, 2}) {
      auto g = diag::check_norm_growth(comp, traj, s);
      if (g.verdict != diag::Verdict::pass) return false;
      ran += 1;
      worst_slack = std::min(worst_slack, g.bound - g.measured);
    }
    return true;
  };

  bool ok = run(rotor, 1, 2, 0.2, 40) && run(rotor, 2, 3, 0.15, 40) &&
            run(harm, 1, 2, 0.1, 60) && run(harm, 2, 3, 0.1, 60);
  std::ostringstream os;
  os << ran << " certificates, smallest bound slack " << worst_slack;
  note = os.str();
  return ok && ran == 8;
}

bool c09_energy_variation(std::string& note) {
  auto rotor = spectral::make_planar_rotor();
  auto comp = galerkin::compress(rotor, 28);
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> pick_segments(2, 8);
  std::uniform_real_distribution<double> pick_value(-0.3, 0.3);
  std::uniform_real_distribution<double> pick_dt(0.1, 0.8);

  int passed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int segs = pick_segments(rng);
    std::vector<double> breaks{0.0}, vals;
    for (int s = 0; s < segs; ++s) {
      breaks.push_back(breaks.back() + pick_dt(rng));
      vals.push_back(pick_value(rng));
    }
    prop::PiecewiseConstantControl u(std::move(breaks), std::move(vals));
    auto traj = prop::propagate(comp, u, basis_state(28, 1));
    auto rl = diag::check_l1_lower_bound(comp, traj);
    if (rl.verdict != diag::Verdict::pass) break;
    g_cost.runs += 1;
    g_cost.samples += long(traj.samples());
    g_cost.worst_excess = std::max(g_cost.worst_excess, rl.measured);
    auto r = diag::check_energy_variation(comp, u, traj);
    if (r.verdict != diag::Verdict::pass) break;
    ++passed;
  }
  std::ostringstream os;
  os << passed << "/50 random controls satisfied the per-segment bound";
  note = os.str();
  return passed == 50;
}

bool c10_degeneracy(std::string& note) {
  auto rotor = spectral::make_planar_rotor();
  auto chain = diag::find_nondegenerate_chain(rotor, 50);

  auto hg = diag::transition_graph(spectral::make_harmonic(), 50);
  int nondeg = 0;
  for (const auto& e : hg.edges) {
    if (!e.degenerate) ++nondeg;
  }

  auto wg = diag::transition_graph(spectral::make_square_well(), 9);
  bool saw = false;
  for (const auto& c : wg.coincidences) {
    if (c.j1 == 1 && c.k1 == 4 && c.j2 == 7 && c.k2 == 8 &&
        std::abs(c.gap - 7.5) < 1e-12) {
      saw = true;
    }
  }

  // cross-check the marking against the exhaustive scan
  bool oracle_ok = true;
  for (const auto& sys : {rotor, spectral::make_harmonic()}) {
    auto g = diag::transition_graph(sys, 50);
    std::set<std::pair<int, int>> got;
    for (const auto& e : g.edges) {
      if (e.degenerate) got.insert({e.j, e.k});
    }
    if (got != oracle::degenerate_edges_bruteforce(sys, 50, 1e-9)) {
      oracle_ok = false;
    }
  }

  std::ostringstream os;
  os << "rotor chain " << (chain.found ? "found" : "missing")
     << ", harmonic non-degenerate edges " << nondeg << "/49, well 15/2 "
     << (saw ? "coincidence present" : "coincidence missing");
  note = os.str();
  return chain.found && nondeg == 0 && saw && oracle_ok;
}

// Minimal truncation order for a ladder climb: smallest N in [target, cap]
// whose terminal state agrees with the cap-order reference within eps.
int minimal_adequate_order(const spectral::SystemPtr& sys,
                           const prop::PiecewiseConstantControl& u, int target,
                           int cap, double eps) {
  auto comp_ref = galerkin::compress(sys, cap);
  Eigen::VectorXcd ref = tracked_final(comp_ref, u, basis_state(cap, 1));
  auto err_at = [&](int N) {
    auto comp = galerkin::compress(sys, N);
    Eigen::VectorXcd x = tracked_final(comp, u, basis_state(N, 1));
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(cap);
    padded.head(N) = x;
    return (padded - ref).norm();
  };
  if (err_at(target) < eps) return target;
  int lo = target, hi = cap;  // err(lo) >= eps, err(hi) == 0 < eps
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (err_at(mid) < eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool c11_ladder_climb(std::string& note) {
  auto anh = spectral::make_anharmonic(3.0);
  synth::DesignOptions opt;
  opt.steps_per_period = 32;

  auto top = synth::ladder_schedule(anh, 10, 0.02, synth::PulseShape::cosine, opt);
  double budget = 0.0;
  for (int j = 1; j <= 9; ++j) budget += 1.0 / std::abs(anh->coupling(j, j + 1));
  budget *= 1.25 * (5.0 * M_PI / 4.0);

  auto comp = galerkin::compress(anh, 40);
  Eigen::VectorXcd xT = tracked_final(comp, top.control, basis_state(40, 1));
  double pop10 = std::norm(xT(9));

  std::vector<int> orders;
  bool increasing = true;
  for (int target : {4, 6, 8, 10}) {
    auto s = synth::ladder_schedule(anh, target, 0.02,
                                    synth::PulseShape::cosine, opt);
    orders.push_back(minimal_adequate_order(anh, s.control, target, 40, 1e-3));
    if (orders.size() > 1 && orders.back() <= orders[orders.size() - 2]) {
      increasing = false;
    }
  }

  std::ostringstream os;
  os << "population(10) = " << pop10 << ", L1 = " << top.total_l1 << " vs "
     << budget << ", minimal orders";
  for (int n : orders) os << " " << n;
  note = os.str();
  return pop10 >= 0.9 && top.total_l1 <= budget && increasing;
}

bool c12_galerkin_convergence(std::string& note) {
  Eigen::VectorXcd c(128);
  for (int k = 1; k <= 128; ++k) c(k - 1) = 1.0 / double(k) / double(k) / double(k);
  c /= c.norm();
  auto spec = galerkin::StateSpec::coefficients(c);

  prop::PiecewiseConstantControl u({0.0, 2.0, 4.0, 6.0}, {0.5, -0.4, 0.3});
  // L1 = 0.5*2 + 0.4*2 + 0.3*2 = 2.4 <= 3

  bool all_decreasing = true;
  std::ostringstream os;
  for (const auto& sys :
       {spectral::make_square_well(), spectral::make_planar_rotor()}) {
    os << sys->name << ":";
    double prev = std::numeric_limits<double>::infinity();
    for (int N : {4, 8, 16, 32, 64}) {
      auto xa = tracked_final(galerkin::compress(sys, N), u, spec.embed(N));
      auto xb = tracked_final(galerkin::compress(sys, 2 * N), u, spec.embed(2 * N));
      Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(2 * N);
      padded.head(N) = xa;
      double err = (padded - xb).norm();
      os << " " << err;
      if (err >= prev) all_decreasing = false;
      prev = err;
    }
    os << "  ";
  }
  note = os.str();
  return all_decreasing;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> criteria{
      {"C01", "truncation order formula", c01_truncation_formula},
      {"C02", "coupling tables vs quadrature oracles", c02_coupling_tables},
      {"C03", "unitarity of randomized propagation", c03_unitarity},
      {"C04", "square-well resonant transfer", c04_well_transfer},
      {"C05", "amplitude scaling monotonicity", c05_amplitude_scaling},
      {"C06", "transfer control cost upper bound", c06_l1_upper_bound},
      {"C07", "global control cost lower bound", c07_global_cost_margin},
      {"C08", "weighted norm growth certificates", c08_norm_growth},
      {"C09", "energy variation certificates", c09_energy_variation},
      {"C10", "transition degeneracy structure", c10_degeneracy},
      {"C11", "anharmonic ladder climb", c11_ladder_climb},
      {"C12", "Galerkin terminal-state convergence", c12_galerkin_convergence},
  };

  // Check 7 aggregates every run the other checks perform, so execute it last
  // but report in order.
  std::vector<bool> ok(criteria.size());
  std::vector<std::string> notes(criteria.size());
  std::vector<double> seconds(criteria.size());
  std::vector<std::size_t> order{0, 1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 6};
  for (std::size_t idx : order) {
    auto t0 = std::chrono::steady_clock::now();
    ok[idx] = criteria[idx].fn(notes[idx]);
    seconds[idx] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  }

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!ok[i]) ++failures;
    std::printf("[%s] %s %s: %s (%s)\n", ok[i] ? "PASS" : "FAIL",
                criteria[i].id, criteria[i].title, notes[i].c_str(),
                format_seconds(seconds[i]).c_str());
  }
  if (failures) std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
