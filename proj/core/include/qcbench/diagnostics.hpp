// diagnostics.hpp: trajectory certificates (norm growth, control cost lower
// bound, energy variation) and the transition graph with degeneracy analysis.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcbench/galerkin.hpp"
#include "qcbench/propagator.hpp"

namespace qcbench::diag {

using galerkin::Compression;
using spectral::SystemPtr;

enum class Verdict { pass, fail, skipped };

const char* to_string(Verdict v);

// Outcome of one inequality check: pass iff measured <= bound + tolerance.
// Skipped checks carry a reason and no verdict on the inequality.
struct DiagnosticReport {
  std::string check;
  std::string inputs;  // compact digest of system/control/parameters
  Verdict verdict{Verdict::skipped};
  double measured{0.0};
  double bound{0.0};
  double tolerance{0.0};
  std::string reason;
  std::map<std::string, double> details;

  // Sets the verdict from measured/bound/tolerance; the only way a report
  // can claim pass.
  void conclude();
};

// Growth certificate for weighted norms: with W = diag(|lambda_k|^{s/2}),
//   ||W x(T)|| <= exp(c_s * ||u||_L1) * ||W x(0)||,
// where c_s is the system's declared coupling bound at index s. Skipped when
// no bound is declared or the trajectory reaches the truncation edge
// (max top-level population >= guard_edge_pop).
DiagnosticReport check_norm_growth(const Compression& comp,
                                   const prop::Trajectory& traj, int s,
                                   double guard_edge_pop = 1e-6,
                                   double tol = 1e-9);

// Lower bound on control cost: at every sample t and level n,
//   | |x_n(0)| - |x_n(t)| | / ||B e_n|| <= integral_0^t |u|.
// Column norms are those of the compressed coupling block. measured is the
// worst left-minus-right margin across the trajectory.
DiagnosticReport check_l1_lower_bound(const Compression& comp,
                                      const prop::Trajectory& traj,
                                      double tol = 1e-6);

// Energy variation for bounded couplings: per constant segment,
//   ||diag(lambda) x(t_end)|| <= ||diag(lambda) x(t_start)|| + 2 |u| ||B||.
// Skipped (reason "B unbounded") when the system declares no operator norm.
DiagnosticReport check_energy_variation(const Compression& comp,
                                        const prop::PiecewiseConstantControl& u,
                                        const prop::Trajectory& traj,
                                        double guard_edge_pop = 1e-6,
                                        double tol = 1e-8);

// Coupled pair with gap metadata. An edge is degenerate when another coupled
// pair with the same gap (relative tolerance) shares exactly one level with
// it; equal-gap pairs that are disjoint or identical do not count.
struct TransitionEdge {
  int j{0}, k{0};
  double gap{0.0};
  double coupling_abs{0.0};
  bool degenerate{false};
};

// Two distinct coupled pairs whose gaps coincide, regardless of overlap.
struct GapCoincidence {
  int j1{0}, k1{0}, j2{0}, k2{0};
  double gap{0.0};
};

struct TransitionGraph {
  int order{0};
  std::vector<TransitionEdge> edges;           // j < k, sorted lexicographically
  std::vector<GapCoincidence> coincidences;
  bool connected{false};                       // over all edges, levels 1..order
};

TransitionGraph transition_graph(const SystemPtr& sys, int N,
                                 double gap_rel_tol = 1e-9);

struct ChainResult {
  bool found{false};
  std::vector<std::pair<int, int>> edges;  // spanning set of non-degenerate edges
  std::vector<int> component;              // levels reachable from 1 when absent
};

// Searches for a connected set of non-degenerate edges spanning 1..N
// (breadth-first from level 1).
ChainResult find_nondegenerate_chain(const SystemPtr& sys, int N,
                                     double gap_rel_tol = 1e-9);

}  // namespace qcbench::diag
