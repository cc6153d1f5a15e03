#include "qcbench/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qcbench::diag {

namespace {

double weighted_norm(const Eigen::VectorXd& lambda, const Eigen::VectorXcd& x,
                     double exponent) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += std::pow(std::abs(lambda(i)), exponent) * std::norm(x(i));
  }
  return std::sqrt(sq);
}

double max_edge_population(const prop::Trajectory& traj) {
  double worst = 0.0;
  for (const auto& x : traj.states) {
    worst = std::max(worst, std::norm(x(x.size() - 1)));
  }
  return worst;
}

std::string system_name(const Compression& comp) {
  return comp.parent ? comp.parent->name : std::string("unnamed");
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "unknown";
}

void DiagnosticReport::conclude() {
  verdict = measured <= bound + tolerance ? Verdict::pass : Verdict::fail;
}

DiagnosticReport check_norm_growth(const Compression& comp,
                                   const prop::Trajectory& traj, int s,
                                   double guard_edge_pop, double tol) {
  if (s < 1) throw std::invalid_argument("norm exponent must be >= 1");
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");

  DiagnosticReport r;
  r.check = "norm-growth";
  std::ostringstream in;
  in << system_name(comp) << " N=" << comp.order << " s=" << s
     << " L1=" << traj.control_l1;
  r.inputs = in.str();

  if (!comp.parent || !comp.parent->known_coupling_bound) {
    r.reason = "no coupling bound declared";
    return r;
  }
  double edge = max_edge_population(traj);
  r.details["edge_population"] = edge;
  if (edge >= guard_edge_pop) {
    r.reason = "truncation edge populated";
    return r;
  }

  double c = comp.parent->known_coupling_bound(s);
  double initial = weighted_norm(comp.lambda, traj.states.front(), double(s));
  r.measured = weighted_norm(comp.lambda, traj.states.back(), double(s));
  r.bound = std::exp(c * traj.control_l1) * initial;
  r.tolerance = tol * std::max(1.0, r.bound);
  r.details["coupling_bound"] = c;
  r.details["initial_norm"] = initial;
  r.conclude();
  return r;
}

DiagnosticReport check_l1_lower_bound(const Compression& comp,
                                      const prop::Trajectory& traj, double tol) {
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");

  DiagnosticReport r;
  r.check = "l1-lower-bound";
  std::ostringstream in;
  in << system_name(comp) << " N=" << comp.order << " L1=" << traj.control_l1;
  r.inputs = in.str();

  Eigen::VectorXd colnorm(comp.order);
  for (int n = 0; n < comp.order; ++n) {
    colnorm(n) = comp.coupling.col(n).norm();
  }

  const Eigen::VectorXcd& x0 = traj.states.front();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Eigen::VectorXcd& x = traj.states[i];
    for (int n = 0; n < comp.order; ++n) {
      double moved = std::abs(std::abs(x0(n)) - std::abs(x(n)));
      if (colnorm(n) < 1e-300) {
        // Uncoupled level: its modulus is a constant of motion, so any
        // movement beyond roundoff is a genuine failure.
        if (moved > 1e-9) {
          worst = std::numeric_limits<double>::infinity();
        }
        continue;
      }
      worst = std::max(worst, moved / colnorm(n) - traj.cumulative_l1[i]);
    }
  }
  r.measured = worst;
  r.bound = 0.0;
  r.tolerance = tol;
  r.conclude();
  return r;
}

DiagnosticReport check_energy_variation(const Compression& comp,
                                        const prop::PiecewiseConstantControl& u,
                                        const prop::Trajectory& traj,
                                        double guard_edge_pop, double tol) {
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");

  DiagnosticReport r;
  r.check = "energy-variation";
  std::ostringstream in;
  in << system_name(comp) << " N=" << comp.order << " segments=" << u.segments();
  r.inputs = in.str();

  if (!comp.parent || !comp.parent->b_opnorm) {
    r.reason = "B unbounded";
    return r;
  }
  double edge = max_edge_population(traj);
  r.details["edge_population"] = edge;
  if (edge >= guard_edge_pop) {
    r.reason = "truncation edge populated";
    return r;
  }

  // The trajectory grid contains every breakpoint; walk both in lockstep.
  double bnorm = *comp.parent->b_opnorm;
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t cursor = 0;
  auto index_of = [&](double t) {
    while (cursor < traj.times.size() && traj.times[cursor] < t) ++cursor;
    if (cursor >= traj.times.size() || traj.times[cursor] != t) {
      throw std::invalid_argument("trajectory grid misses a control breakpoint");
    }
    return cursor;
  };
  for (std::size_t seg = 0; seg < u.segments(); ++seg) {
    std::size_t a = index_of(u.breakpoints[seg]);
    double start = weighted_norm(comp.lambda, traj.states[a], 2.0);
    std::size_t b = index_of(u.breakpoints[seg + 1]);
    double end = weighted_norm(comp.lambda, traj.states[b], 2.0);
    worst = std::max(worst, end - (start + 2.0 * std::abs(u.values[seg]) * bnorm));
  }
  if (u.segments() == 0) worst = 0.0;
  r.measured = worst;
  r.bound = 0.0;
  r.tolerance = tol;
  r.details["b_opnorm"] = bnorm;
  r.conclude();
  return r;
}

TransitionGraph transition_graph(const SystemPtr& sys, int N, double gap_rel_tol) {
  if (!sys) throw std::invalid_argument("null system");
  if (N < 1) throw std::invalid_argument("graph order must be >= 1");
  sys->require_level(N);

  TransitionGraph g;
  g.order = N;
  for (int j = 1; j <= N; ++j) {
    for (int k = j + 1; k <= N; ++k) {
      double b = std::abs(sys->coupling(j, k));
      if (b == 0.0) continue;
      g.edges.push_back(
          {j, k, std::abs(sys->eigenvalue(j) - sys->eigenvalue(k)), b, false});
    }
  }

  // Group edges by gap within a relative tolerance, then scan groups for
  // coincidences and overlap-based degeneracy.
  double max_gap = 0.0;
  for (const auto& e : g.edges) max_gap = std::max(max_gap, e.gap);
  double tol = gap_rel_tol * max_gap;

  std::vector<std::size_t> idx(g.edges.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return g.edges[a].gap < g.edges[b].gap;
  });

  std::size_t group_start = 0;
  for (std::size_t i = 1; i <= idx.size(); ++i) {
    bool boundary = i == idx.size() ||
                    g.edges[idx[i]].gap - g.edges[idx[i - 1]].gap > tol;
    if (!boundary) continue;
    for (std::size_t a = group_start; a < i; ++a) {
      for (std::size_t b = a + 1; b < i; ++b) {
        TransitionEdge& ea = g.edges[idx[a]];
        TransitionEdge& eb = g.edges[idx[b]];
        g.coincidences.push_back({ea.j, ea.k, eb.j, eb.k, ea.gap});
        int shared = int(ea.j == eb.j) + int(ea.j == eb.k) + int(ea.k == eb.j) +
                     int(ea.k == eb.k);
        if (shared == 1) {
          ea.degenerate = true;
          eb.degenerate = true;
        }
      }
    }
    group_start = i;
  }

  // Connectivity over all edges.
  std::vector<std::vector<int>> adj(N + 1);
  for (const auto& e : g.edges) {
    adj[e.j].push_back(e.k);
    adj[e.k].push_back(e.j);
  }
  std::vector<bool> seen(N + 1, false);
  std::vector<int> queue{1};
  seen[1] = true;
  int reached = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    ++reached;
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  g.connected = reached == N;

  std::sort(g.coincidences.begin(), g.coincidences.end(),
            [](const GapCoincidence& a, const GapCoincidence& b) {
              return std::tie(a.j1, a.k1, a.j2, a.k2) <
                     std::tie(b.j1, b.k1, b.j2, b.k2);
            });
  return g;
}

ChainResult find_nondegenerate_chain(const SystemPtr& sys, int N,
                                     double gap_rel_tol) {
  TransitionGraph g = transition_graph(sys, N, gap_rel_tol);

  std::vector<std::vector<std::pair<int, int>>> adj(N + 1);  // (neighbor, edge idx)
  for (int i = 0; i < int(g.edges.size()); ++i) {
    const auto& e = g.edges[i];
    if (e.degenerate) continue;
    adj[e.j].push_back({e.k, i});
    adj[e.k].push_back({e.j, i});
  }

  ChainResult out;
  std::vector<bool> seen(N + 1, false);
  std::vector<int> queue{1};
  seen[1] = true;
  std::size_t head = 0;
  while (head < queue.size()) {
    int v = queue[head++];
    for (auto [w, ei] : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
        out.edges.push_back({g.edges[ei].j, g.edges[ei].k});
      }
    }
  }
  if (int(queue.size()) == N) {
    out.found = true;
  } else {
    out.component = queue;
    std::sort(out.component.begin(), out.component.end());
    out.edges.clear();
  }
  return out;
}

}  // namespace qcbench::diag
