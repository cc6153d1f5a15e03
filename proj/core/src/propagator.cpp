#include "qcbench/propagator.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qcbench::prop {

namespace {

constexpr cplx kI{0.0, 1.0};

// Spectral factorization of H_u = diag(-lambda) + u * hermitian_coupling.
// Real-symmetric generators (all built-in systems) use the real solver and
// keep the basis real, halving the cost of the per-segment products.
struct SegmentBasis {
  Eigen::VectorXd w;    // eigenvalues of H_u
  bool real{false};
  Eigen::MatrixXd vr;   // eigenvectors, real path
  Eigen::MatrixXcd vc;  // eigenvectors, complex path

  Eigen::VectorXcd to_basis(const Eigen::VectorXcd& x) const {
    if (real) {
      return (vr.transpose() * x.real()).cast<cplx>() +
             kI * (vr.transpose() * x.imag()).cast<cplx>();
    }
    return vc.adjoint() * x;
  }

  Eigen::VectorXcd from_basis(const Eigen::VectorXcd& y) const {
    if (real) {
      return (vr * y.real()).cast<cplx>() + kI * (vr * y.imag()).cast<cplx>();
    }
    return vc * y;
  }
};

SegmentBasis decompose(const Compression& comp, double u) {
  SegmentBasis basis;
  if (comp.real_generator) {
    Eigen::MatrixXd h = u * comp.hermitian_coupling.real();
    h.diagonal() -= comp.lambda;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eigendecomposition of the segment generator failed");
    }
    basis.real = true;
    basis.w = es.eigenvalues();
    basis.vr = es.eigenvectors();
  } else {
    Eigen::MatrixXcd h = u * comp.hermitian_coupling;
    h.diagonal() -= comp.lambda.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eigendecomposition of the segment generator failed");
    }
    basis.w = es.eigenvalues();
    basis.vc = es.eigenvectors();
  }
  return basis;
}

Eigen::VectorXcd phases(const Eigen::VectorXd& w, double dt) {
  Eigen::VectorXcd p(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    p(i) = std::exp(cplx{0.0, -w(i) * dt});
  }
  return p;
}

void check_state(const Compression& comp, const Eigen::VectorXcd& psi0) {
  if (psi0.size() != comp.order) {
    throw std::invalid_argument("initial state dimension does not match order");
  }
  if (!psi0.allFinite()) throw std::invalid_argument("non-finite initial state");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("initial state must have unit norm");
  }
}

}  // namespace

double Trajectory::population(std::size_t sample, int level) const {
  if (sample >= states.size() || level < 1 || level > order) {
    throw std::invalid_argument("trajectory sample or level out of range");
  }
  return std::norm(states[sample](level - 1));
}

double Trajectory::norm_at(std::size_t sample) const {
  if (sample >= states.size()) {
    throw std::invalid_argument("trajectory sample out of range");
  }
  return states[sample].norm();
}

Eigen::VectorXcd propagate_observe(const Compression& comp,
                                   const PiecewiseConstantControl& u,
                                   const Eigen::VectorXcd& psi0,
                                   double sample_dt, const StepObserver& observer) {
  check_state(comp, psi0);
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");

  std::unordered_map<double, SegmentBasis> cache;
  auto basis_for = [&](double value) -> const SegmentBasis& {
    auto it = cache.find(value);
    if (it == cache.end()) {
      it = cache.emplace(value, decompose(comp, value)).first;
    }
    return it->second;
  };

  Eigen::VectorXcd x = psi0;
  double l1 = 0.0;
  if (observer) observer(0.0, x, l1);

  for (std::size_t seg = 0; seg < u.segments(); ++seg) {
    double t0 = u.breakpoints[seg];
    double t1 = u.breakpoints[seg + 1];
    double val = u.values[seg];
    const SegmentBasis& basis = basis_for(val);
    Eigen::VectorXcd y = basis.to_basis(x);

    if (observer && std::isfinite(sample_dt)) {
      for (double t = t0 + sample_dt; t < t1 - sample_dt * 1e-9; t += sample_dt) {
        Eigen::VectorXcd xt = basis.from_basis(phases(basis.w, t - t0).cwiseProduct(y));
        observer(t, xt, l1 + std::abs(val) * (t - t0));
      }
    }

    x = basis.from_basis(phases(basis.w, t1 - t0).cwiseProduct(y));
    l1 += std::abs(val) * (t1 - t0);
    if (observer) observer(t1, x, l1);

    // Unitary-by-construction evolution; meaningful drift means a bug.
    double drift = std::abs(x.norm() - 1.0);
    if (drift > 1e-7) {
      throw std::runtime_error("propagation lost unitarity (norm drift " +
                               std::to_string(drift) + ")");
    }
  }
  return x;
}

Trajectory propagate(const Compression& comp, const PiecewiseConstantControl& u,
                     const Eigen::VectorXcd& psi0, double sample_dt) {
  Trajectory traj;
  traj.order = comp.order;
  traj.control_l1 = u.l1_norm();
  propagate_observe(comp, u, psi0, sample_dt,
                    [&](double t, const Eigen::VectorXcd& x, double l1) {
                      traj.times.push_back(t);
                      traj.states.push_back(x);
                      traj.cumulative_l1.push_back(l1);
                    });
  return traj;
}

Eigen::VectorXcd propagate_final(const Compression& comp,
                                 const PiecewiseConstantControl& u,
                                 const Eigen::VectorXcd& psi0) {
  return propagate_observe(comp, u, psi0, kBreakpointsOnly, nullptr);
}

Trajectory propagate_sampled(const Compression& comp,
                             const std::function<double(double)>& u,
                             double duration, double dt,
                             const Eigen::VectorXcd& psi0) {
  if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
  if (duration == 0.0) {
    return propagate(comp, PiecewiseConstantControl{}, psi0);
  }
  return propagate(comp, sample_midpoint(u, duration, dt), psi0);
}

Eigen::MatrixXcd propagator_matrix(const Compression& comp,
                                   const PiecewiseConstantControl& u) {
  std::unordered_map<double, SegmentBasis> cache;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(comp.order, comp.order);
  for (std::size_t seg = 0; seg < u.segments(); ++seg) {
    double dt = u.breakpoints[seg + 1] - u.breakpoints[seg];
    auto it = cache.find(u.values[seg]);
    if (it == cache.end()) {
      it = cache.emplace(u.values[seg], decompose(comp, u.values[seg])).first;
    }
    const SegmentBasis& basis = it->second;
    Eigen::MatrixXcd step;
    if (basis.real) {
      Eigen::MatrixXcd vc = basis.vr.cast<cplx>();
      step = vc * phases(basis.w, dt).asDiagonal() * vc.adjoint();
    } else {
      step = basis.vc * phases(basis.w, dt).asDiagonal() * basis.vc.adjoint();
    }
    m = step * m;
  }
  return m;
}

}  // namespace qcbench::prop
