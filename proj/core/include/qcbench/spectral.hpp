// spectral.hpp: quantum systems defined by spectral data (drift eigenvalues
// plus control coupling matrix elements), addressed by 1-based level indices.
#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qcbench::spectral {

using cplx = std::complex<double>;

// Admissible control values. Either a closed interval or a finite value set;
// both must contain 0 and 1.
struct ControlSet {
  enum class Kind { interval, finite };
  Kind kind{Kind::interval};
  double lo{-std::numeric_limits<double>::infinity()};
  double hi{std::numeric_limits<double>::infinity()};
  std::vector<double> values;  // used when kind == finite

  bool contains(double u, double tol = 0.0) const;
  static ControlSet all_reals();
  static ControlSet interval(double lo, double hi);
  static ControlSet finite(std::vector<double> vals);
};

// A system dpsi/dt = (A + u B) psi described purely by spectral data:
//   eigenvalue(k)  : lambda_k with A phi_k = i lambda_k phi_k, lambda_k
//                    negative and decreasing toward -inf,
//   coupling(j, k) : the published matrix element table b_jk = <phi_j, B phi_k>.
//
// Some source tables are written up to a global factor i (real symmetric
// tables of a multiplication operator W, where B = i W or -i W). operator_phase
// maps the stored table to the operator-level matrix: B_jk = operator_phase *
// coupling(j, k) is skew-Hermitian for every system. All indices are 1-based.
struct SpectralSystem {
  std::string name;
  std::function<double(int)> eigenvalue;
  std::function<cplx(int, int)> coupling;
  cplx operator_phase{1.0, 0.0};
  ControlSet control_set{ControlSet::all_reals()};

  // Optional analytic upper bound c_k on the weak-coupling constants used by
  // norm growth diagnostics. Absent when no bound is known.
  std::function<double(int)> known_coupling_bound;

  // Operator norm of B when B is bounded (needed by the energy variation
  // diagnostic); absent for unbounded couplings.
  std::optional<double> b_opnorm;

  // Highest addressable level for data-file systems; unbounded otherwise.
  std::optional<int> max_order;

  // Human-readable record of table conventions (diagonal handling,
  // normalization, phase).
  std::string math_note;

  // Operator-level skew-Hermitian matrix element operator_phase * b_jk.
  cplx operator_element(int j, int k) const;

  // Euclidean norm of column n of the order-N coupling block,
  // sqrt(sum_{j<=N} |b_jn|^2). Requires 1 <= n <= N.
  double coupling_norm_column(int n, int N) const;

  void require_level(int k) const;  // throws std::invalid_argument on bad index
};

using SystemPtr = std::shared_ptr<const SpectralSystem>;

// Infinite square well on (0, pi) with dipole control.
// lambda_k = -k^2/2; b_jk = (-1)^{j+k} 2jk/(j^2-k^2)^2 for odd j-k, else 0
// (the published table; real symmetric, operator_phase = i).
SystemPtr make_square_well();

// Harmonic oscillator with dipole control. lambda_n = -(n - 1/2);
// b tri-diagonal: -i sqrt(k/2) at j = k-1, -i sqrt((k+1)/2) at j = k+1.
SystemPtr make_harmonic();

// Planar rotor with cos(theta) control on the odd sector. lambda_k = -k^2;
// b_jk = -i/2 exactly when |j-k| = 1. B is bounded with norm 1.
SystemPtr make_planar_rotor();

// Anharmonic-spectrum oscillator with quartic control, alpha >= 1.
// Levels are the even modes of H0 = -(1/2)d^2/dx^2 + x^2: with
// mu_n = sqrt(2)(2(n-1) + 1/2), lambda_n = -(mu_n^alpha + 1/mu_n) and
// b_jk = -i <phi_{2(j-1)}, x^4 phi_{2(k-1)}>, banded with |j-k| <= 2.
SystemPtr make_anharmonic(double alpha);

// Exact ladder-algebra value of <phi_{2(j-1)}, x^4 phi_{2(k-1)}> for the
// oscillator above (real, symmetric, zero for |j-k| > 2). Exposed so callers
// can inspect the quartic band profile directly.
double anharmonic_x4_element(int j, int k);

// Resolve a CLI/config system name: "square-well", "harmonic", "planar-rotor",
// or "anharmonic(alpha=A)". Throws std::invalid_argument on unknown names.
SystemPtr make_system_by_name(const std::string& name);

// Probe invariants on levels 1..N: skew-adjointness of the operator-level
// coupling, strictly decreasing eigenvalues, and zero coupling between equal
// eigenvalues. Throws std::runtime_error describing the first violation.
void validate_system(const SpectralSystem& sys, int N, double tol = 0.0);

}  // namespace qcbench::spectral
