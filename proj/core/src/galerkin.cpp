#include "qcbench/galerkin.hpp"

#include <cmath>
#include <stdexcept>

#include "qcbench/propagator.hpp"

namespace qcbench::galerkin {

Eigen::MatrixXcd Compression::drift_matrix() const {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(order, order);
  for (int k = 0; k < order; ++k) d(k, k) = cplx{0.0, lambda(k)};
  return d;
}

Eigen::MatrixXcd Compression::generator(double u) const {
  return drift_matrix() + u * coupling;
}

Compression compress(const SystemPtr& sys, int N) {
  if (!sys) throw std::invalid_argument("null system");
  if (N < 1) throw std::invalid_argument("compression order must be >= 1");
  sys->require_level(N);

  Compression c;
  c.parent = sys;
  c.order = N;
  c.lambda.resize(N);
  for (int k = 1; k <= N; ++k) c.lambda(k - 1) = sys->eigenvalue(k);

  c.coupling.resize(N, N);
  for (int k = 1; k <= N; ++k) {
    for (int j = 1; j <= N; ++j) {
      c.coupling(j - 1, k - 1) = sys->operator_element(j, k);
    }
  }
  c.hermitian_coupling = cplx{0.0, 1.0} * c.coupling;

  c.bandwidth = 0;
  double imag_max = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      if (c.coupling(j, k) != cplx{0.0, 0.0}) {
        c.bandwidth = std::max(c.bandwidth, std::abs(j - k));
      }
      imag_max = std::max(imag_max, std::abs(c.hermitian_coupling(j, k).imag()));
    }
  }
  c.real_generator = imag_max == 0.0;
  return c;
}

namespace {

// log of the ladder tail estimate at order N.
double log_tail_bound(int N, double K) {
  return (N - 1) * std::log(2.0) + 0.5 * std::log(double(N) + 2.0) -
         std::lgamma(double(N)) +
         0.5 * (std::lgamma(2.0 * N + 1.0) - std::lgamma(double(N) + 2.0)) +
         N * std::log(K);
}

}  // namespace

std::optional<int> harmonic_truncation_order(double K, double eps, int max_order) {
  if (!(K >= 0.0) || !std::isfinite(K)) {
    throw std::invalid_argument("coupling scale K must be finite and >= 0");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
  if (K == 0.0) return 1;  // the estimate vanishes identically

  double target = std::log(eps);
  if (log_tail_bound(1, K) < target) return 1;

  // The estimate rises to a single maximum and then falls monotonically
  // (successive ratios decrease in N), so once N = 1 fails the satisfying
  // set is an upper tail: double past the crossing, then bisect.
  int hi = 1;
  while (log_tail_bound(hi, K) >= target) {
    if (hi > max_order) return std::nullopt;
    hi *= 2;
  }
  int lo = hi / 2;  // fails; hi succeeds
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (log_tail_bound(mid, K) < target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi > max_order) return std::nullopt;
  return hi;
}

// ------------------------------------------------------------------ StateSpec

StateSpec StateSpec::level(int k) {
  if (k < 1) throw std::invalid_argument("level must be >= 1");
  StateSpec s;
  s.value = k;
  return s;
}

StateSpec StateSpec::coefficients(Eigen::VectorXcd c) {
  if (c.size() == 0) throw std::invalid_argument("empty coefficient list");
  if (std::abs(c.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("coefficient list must have unit norm");
  }
  StateSpec s;
  s.value = std::move(c);
  return s;
}

int StateSpec::support() const {
  if (std::holds_alternative<int>(value)) return std::get<int>(value);
  const auto& c = std::get<Eigen::VectorXcd>(value);
  for (int k = int(c.size()); k >= 1; --k) {
    if (c(k - 1) != cplx{0.0, 0.0}) return k;
  }
  throw std::invalid_argument("zero coefficient list");
}

Eigen::VectorXcd StateSpec::embed(int N) const {
  if (N < 1) throw std::invalid_argument("order must be >= 1");
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(N);
  if (std::holds_alternative<int>(value)) {
    int k = std::get<int>(value);
    if (k > N) throw std::invalid_argument("occupied level exceeds order");
    x(k - 1) = 1.0;
    return x;
  }
  const auto& c = std::get<Eigen::VectorXcd>(value);
  int copy = std::min<int>(N, int(c.size()));
  x.head(copy) = c.head(copy);
  double nrm = x.norm();
  if (nrm < 1e-12) {
    throw std::invalid_argument("initial state projects to zero at this order");
  }
  return x / nrm;
}

TruncationResult empirical_truncation_order(const SystemPtr& sys,
                                            const prop::PiecewiseConstantControl& u,
                                            const StateSpec& psi0, double eps,
                                            int cap, int start) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  int N = std::max(start, psi0.support());
  if (N < 1) N = 1;
  if (cap < 2 * N) {
    throw std::invalid_argument("cap too small for the initial order");
  }

  TruncationResult out;
  auto terminal = [&](int order) {
    return prop::propagate_final(compress(sys, order), u, psi0.embed(order));
  };
  Eigen::VectorXcd xN = terminal(N);
  while (2 * N <= cap) {
    Eigen::VectorXcd x2N = terminal(2 * N);
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(2 * N);
    padded.head(N) = xN;
    double err = (padded - x2N).norm();
    out.table.push_back({N, err});
    if (err < eps) {
      out.order = N;
      return out;
    }
    N *= 2;
    xN = std::move(x2N);
  }
  out.cap_exceeded = true;
  return out;
}

}  // namespace qcbench::galerkin
