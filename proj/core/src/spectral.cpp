#include "qcbench/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcbench::spectral {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_positive_index(int k, const char* what) {
  if (k < 1) {
    std::ostringstream msg;
    msg << what << " index must be >= 1, got " << k;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------- ControlSet

bool ControlSet::contains(double u, double tol) const {
  if (!std::isfinite(u)) return false;
  if (kind == Kind::interval) return u >= lo - tol && u <= hi + tol;
  for (double v : values) {
    if (std::abs(u - v) <= tol) return true;
  }
  return false;
}

ControlSet ControlSet::all_reals() { return ControlSet{}; }

ControlSet ControlSet::interval(double lo, double hi) {
  if (!(lo <= 0.0) || !(hi >= 1.0)) {
    throw std::invalid_argument("control interval must contain 0 and 1");
  }
  ControlSet s;
  s.kind = Kind::interval;
  s.lo = lo;
  s.hi = hi;
  return s;
}

ControlSet ControlSet::finite(std::vector<double> vals) {
  ControlSet s;
  s.kind = Kind::finite;
  s.values = std::move(vals);
  if (!s.contains(0.0) || !s.contains(1.0)) {
    throw std::invalid_argument("finite control set must contain 0 and 1");
  }
  return s;
}

// ------------------------------------------------------------ SpectralSystem

cplx SpectralSystem::operator_element(int j, int k) const {
  return operator_phase * coupling(j, k);
}

double SpectralSystem::coupling_norm_column(int n, int N) const {
  require_level(n);
  if (N < n) {
    throw std::invalid_argument("coupling_norm_column requires n <= N");
  }
  require_level(N);
  double sq = 0.0;
  for (int j = 1; j <= N; ++j) {
    sq += std::norm(coupling(j, n));
  }
  return std::sqrt(sq);
}

void SpectralSystem::require_level(int k) const {
  require_positive_index(k, "level");
  if (max_order && k > *max_order) {
    std::ostringstream msg;
    msg << "system '" << name << "' defines levels 1.." << *max_order
        << ", got " << k;
    throw std::invalid_argument(msg.str());
  }
}

// ------------------------------------------------------------ built-in systems

SystemPtr make_square_well() {
  auto sys = std::make_shared<SpectralSystem>();
  sys->name = "square-well";
  sys->eigenvalue = [](int k) {
    require_positive_index(k, "level");
    return -0.5 * double(k) * double(k);
  };
  sys->coupling = [](int j, int k) -> cplx {
    require_positive_index(j, "level");
    require_positive_index(k, "level");
    if ((j - k) % 2 == 0) return cplx{0.0, 0.0};  // even difference, diagonal included
    double jj = j, kk = k;
    double denom = (jj * jj - kk * kk);
    double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
    return cplx{sign * 2.0 * jj * kk / (denom * denom), 0.0};
  };
  // The table stores the real symmetric matrix of the position operator in
  // the published normalization; the control operator itself is i times it.
  sys->operator_phase = kI;
  sys->math_note =
      "table is <phi_j, x phi_k> with phi_k = sin(kx)/sqrt(2) (factor i of the "
      "operator and the pi/4 rescaling to unit-norm eigenfunctions omitted, as "
      "published); diagonal entries are zero by the odd-difference rule";
  return sys;
}

SystemPtr make_harmonic() {
  auto sys = std::make_shared<SpectralSystem>();
  sys->name = "harmonic";
  sys->eigenvalue = [](int n) {
    require_positive_index(n, "level");
    return -(double(n) - 0.5);
  };
  sys->coupling = [](int j, int k) -> cplx {
    require_positive_index(j, "level");
    require_positive_index(k, "level");
    if (j == k - 1) return -kI * std::sqrt(double(k) / 2.0);
    if (j == k + 1) return -kI * std::sqrt(double(k + 1) / 2.0);
    return cplx{0.0, 0.0};
  };
  sys->known_coupling_bound = [](int k) {
    require_positive_index(k, "bound");
    return std::pow(3.0, k) - 1.0;
  };
  sys->math_note =
      "tri-diagonal ladder table as published (indices enter the square roots "
      "directly); dipole coupling is unbounded, no operator norm declared";
  return sys;
}

SystemPtr make_planar_rotor() {
  auto sys = std::make_shared<SpectralSystem>();
  sys->name = "planar-rotor";
  sys->eigenvalue = [](int k) {
    require_positive_index(k, "level");
    return -double(k) * double(k);
  };
  sys->coupling = [](int j, int k) -> cplx {
    require_positive_index(j, "level");
    require_positive_index(k, "level");
    if (std::abs(j - k) == 1) return cplx{0.0, -0.5};
    return cplx{0.0, 0.0};
  };
  sys->known_coupling_bound = [](int k) {
    require_positive_index(k, "bound");
    return 0.5 * (std::pow(4.0, k) - 1.0);
  };
  sys->b_opnorm = 1.0;  // multiplication by cos(theta)
  sys->math_note =
      "odd sector of the rotor, phi_k = sin(k theta)/sqrt(pi); cos(theta) "
      "coupling links adjacent levels only and is bounded with norm 1";
  return sys;
}

double anharmonic_x4_element(int j, int k) {
  require_positive_index(j, "level");
  require_positive_index(k, "level");
  if (j < k) std::swap(j, k);
  // Underlying mode numbers of H0 = -(1/2)d2/dx2 + x^2 (frequency sqrt(2)),
  // even sector only. x = (a + a*)/2^{3/4}, so x^4 = (a + a*)^4 / 8 and the
  // band values follow from the ladder algebra for (a + a*)^4.
  double m = 2.0 * (k - 1);
  switch (j - k) {
    case 0:
      return 3.0 * (2.0 * m * m + 2.0 * m + 1.0) / 8.0;
    case 1:
      return (4.0 * m + 6.0) * std::sqrt((m + 1.0) * (m + 2.0)) / 8.0;
    case 2:
      return std::sqrt((m + 1.0) * (m + 2.0) * (m + 3.0) * (m + 4.0)) / 8.0;
    default:
      return 0.0;
  }
}

SystemPtr make_anharmonic(double alpha) {
  if (!(alpha >= 1.0)) {
    throw std::invalid_argument("anharmonic exponent alpha must be >= 1");
  }
  auto sys = std::make_shared<SpectralSystem>();
  std::ostringstream name;
  name << "anharmonic(alpha=" << alpha << ")";
  sys->name = name.str();
  sys->eigenvalue = [alpha](int n) {
    require_positive_index(n, "level");
    double mu = std::sqrt(2.0) * (2.0 * (n - 1) + 0.5);
    return -(std::pow(mu, alpha) + 1.0 / mu);
  };
  sys->coupling = [](int j, int k) -> cplx {
    return -kI * anharmonic_x4_element(j, k);
  };
  sys->math_note =
      "even modes of -(1/2)d2/dx2 + x^2 driven through x^4; quartic band "
      "|j-k| <= 2 with nonzero diagonal, nearest-band magnitude grows like "
      "2 j^2 so inverse couplings are summable; spectrum well-defined for any "
      "real control at finite order";
  return sys;
}

SystemPtr make_system_by_name(const std::string& name) {
  if (name == "square-well") return make_square_well();
  if (name == "harmonic") return make_harmonic();
  if (name == "planar-rotor") return make_planar_rotor();
  const std::string prefix = "anharmonic(alpha=";
  if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
    std::string num = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    std::size_t used = 0;
    double alpha;
    try {
      alpha = std::stod(num, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad anharmonic exponent: '" + num + "'");
    }
    if (used != num.size()) {
      throw std::invalid_argument("bad anharmonic exponent: '" + num + "'");
    }
    return make_anharmonic(alpha);
  }
  throw std::invalid_argument(
      "unknown system '" + name +
      "' (expected square-well, harmonic, planar-rotor, anharmonic(alpha=A), "
      "or a spectral data file)");
}

void validate_system(const SpectralSystem& sys, int N, double tol) {
  require_positive_index(N, "probe depth");
  if (sys.max_order && N > *sys.max_order) N = *sys.max_order;
  for (int k = 1; k <= N; ++k) {
    double lk = sys.eigenvalue(k);
    if (!std::isfinite(lk)) {
      throw std::runtime_error("non-finite eigenvalue at level " + std::to_string(k));
    }
    if (k > 1 && !(lk < sys.eigenvalue(k - 1))) {
      throw std::runtime_error("eigenvalues must strictly decrease, violated at level " +
                               std::to_string(k));
    }
  }
  for (int j = 1; j <= N; ++j) {
    for (int k = j; k <= N; ++k) {
      cplx bjk = sys.operator_element(j, k);
      cplx bkj = sys.operator_element(k, j);
      if (std::abs(bjk + std::conj(bkj)) > tol) {
        std::ostringstream msg;
        msg << "coupling is not skew-adjoint at (" << j << "," << k << ")";
        throw std::runtime_error(msg.str());
      }
      // Couplings between coinciding drift eigenvalues are disallowed; the
      // built-in spectra are simple so this only fires for data-file systems.
      if (j != k && sys.eigenvalue(j) == sys.eigenvalue(k) && std::abs(bjk) > tol) {
        std::ostringstream msg;
        msg << "nonzero coupling between equal eigenvalues at (" << j << "," << k << ")";
        throw std::runtime_error(msg.str());
      }
    }
  }
}

}  // namespace qcbench::spectral
