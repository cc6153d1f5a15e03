// galerkin.hpp: finite-dimensional compressions of spectral systems and
// truncation order selection (analytic for the harmonic ladder, empirical
// doubling elsewhere).
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "qcbench/control.hpp"
#include "qcbench/spectral.hpp"

namespace qcbench::galerkin {

using spectral::cplx;
using spectral::SystemPtr;

// Order-N block of a spectral system. drift is diagonal with entries
// i*lambda_k; coupling is the operator-level skew-Hermitian block. The
// Hermitian generator of a segment with value u is
//   H_u = diag(-lambda) + u * hermitian_coupling,
// with hermitian_coupling = i * coupling, so exp(t(A+uB)) = exp(-i t H_u).
struct Compression {
  SystemPtr parent;
  int order{0};
  Eigen::VectorXd lambda;              // lambda_1..lambda_N
  Eigen::MatrixXcd coupling;           // skew-Hermitian B block
  Eigen::MatrixXcd hermitian_coupling; // i * coupling
  int bandwidth{0};                    // max |j-k| with b_jk != 0 within N
  bool real_generator{false};          // hermitian_coupling has zero imaginary part

  Eigen::MatrixXcd drift_matrix() const;
  Eigen::MatrixXcd generator(double u) const;  // A + u B (skew-Hermitian)
};

// Builds the order-N compression. Throws on N < 1 or N beyond the system's
// addressable range.
Compression compress(const SystemPtr& sys, int N);

// Smallest N making the harmonic ladder tail estimate
//   2^{N-1} sqrt(N+2)/(N-1)! * sqrt((2N)!/(N+1)!) * K^N
// fall below eps, evaluated in log space. Returns nullopt when no
// N <= max_order works. K >= 0, eps > 0.
std::optional<int> harmonic_truncation_order(double K, double eps,
                                             int max_order = 1000000);

// Initial state specification: a single occupied level or an explicit
// (unnormalized is rejected) coefficient list over leading levels.
struct StateSpec {
  std::variant<int, Eigen::VectorXcd> value{1};

  static StateSpec level(int k);
  static StateSpec coefficients(Eigen::VectorXcd c);

  int support() const;  // highest level with nonzero coefficient
  // Projection onto the leading N levels, renormalized. Throws if the
  // projection vanishes or the spec does not fit the order.
  Eigen::VectorXcd embed(int N) const;
};

struct TruncationRow {
  int order;        // N of the compared pair (N, 2N)
  double error;     // terminal-state distance between order N and 2N runs
};

struct TruncationResult {
  std::optional<int> order;          // smallest adequate N, if found
  std::vector<TruncationRow> table;  // full error-vs-N curve
  bool cap_exceeded{false};
};

// Doubles N starting from max(start, psi0 support) until the terminal states
// of the order-N and order-2N propagations agree within eps (Euclidean norm
// after zero-padding). Stops once 2N would exceed cap.
TruncationResult empirical_truncation_order(const SystemPtr& sys,
                                            const prop::PiecewiseConstantControl& u,
                                            const StateSpec& psi0, double eps,
                                            int cap = 1024, int start = 0);

}  // namespace qcbench::galerkin
