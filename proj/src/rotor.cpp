#include "symtop/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "symtop/errors.hpp"
#include "symtop/units.hpp"

namespace symtop {
namespace {

std::string describe(int J, int K, int M) {
  std::ostringstream os;
  os << "(J=" << J << ", K=" << K << ", M=" << M << ")";
  return os.str();
}

void require_ladder_state(int J, int K0, int M0) {
  if (J < 0 || std::abs(K0) > J || std::abs(M0) > J) {
    throw DomainError("invalid quantum numbers " + describe(J, K0, M0) +
                      ": need J >= 0, |K| <= J, |M| <= J");
  }
}

}  // namespace

void RotorConstants::validate() const {
  if (!(C > 0.0) || !(A > C)) {
    throw DomainError("rotor constants must satisfy A > C > 0");
  }
  if (DJ < 0.0 || DJK < 0.0 || DK < 0.0) {
    throw DomainError("centrifugal distortion constants must be non-negative");
  }
  if (!(mu0 > 0.0)) {
    throw DomainError("permanent dipole moment must be positive");
  }
}

RotorConstants RotorConstants::ch3i() {
  return RotorConstants{
      .A = 5.173949,
      .C = 0.25098,
      .DJ = 2.1040012e-7,
      .DJK = 3.2944780e-6,
      .DK = 8.7632195e-5,
      .mu0 = 1.6406,
  };
}

void RotState::validate() const { require_ladder_state(J, K, M); }

Subspace::Subspace(int K0, int M0, int j_max)
    : k0_(K0), m0_(M0), j_min_(std::max(std::abs(K0), std::abs(M0))), j_max_(j_max) {
  if (j_max_ < j_min_ + 1) {
    std::ostringstream os;
    os << "subspace (K0=" << K0 << ", M0=" << M0 << ") needs j_max >= " << j_min_ + 1
       << ", got " << j_max;
    throw DomainError(os.str());
  }
}

int Subspace::index_of(int J) const {
  if (!contains(J)) {
    std::ostringstream os;
    os << "J=" << J << " outside subspace [" << j_min_ << ", " << j_max_ << "]";
    throw DomainError(os.str());
  }
  return J - j_min_;
}

double Tridiagonal::at(int row, int col) const {
  if (row == col) return diag[static_cast<std::size_t>(row)];
  if (row == col + 1) return off[static_cast<std::size_t>(col)];
  if (col == row + 1) return off[static_cast<std::size_t>(row)];
  return 0.0;
}

double eigenenergy(int J, int K, const RotorConstants& constants, bool include_distortion) {
  if (J < 0 || std::abs(K) > J) {
    throw DomainError("invalid quantum numbers (J=" + std::to_string(J) +
                      ", K=" + std::to_string(K) + "): need |K| <= J");
  }
  const double jj = static_cast<double>(J) * (J + 1);
  const double k2 = static_cast<double>(K) * K;
  double energy = constants.C * jj + (constants.A - constants.C) * k2;
  if (include_distortion) {
    energy -= constants.DJ * jj * jj + constants.DJK * jj * k2 + constants.DK * k2 * k2;
  }
  return energy;
}

double transition_frequency(int J0, int K0, const RotorConstants& constants,
                            bool include_distortion) {
  const double lower = eigenenergy(J0, K0, constants, include_distortion);
  const double upper = eigenenergy(J0 + 1, K0, constants, include_distortion);
  return units::cm1_to_internal(upper - lower);
}

double cos_diag(int J, int K0, int M0) {
  require_ladder_state(J, K0, M0);
  if (J == 0) return 0.0;
  return static_cast<double>(K0) * M0 / (static_cast<double>(J) * (J + 1));
}

double cos_offdiag(int J, int K0, int M0) {
  require_ladder_state(J, K0, M0);
  const double j1 = J + 1.0;
  const double num = (j1 * j1 - static_cast<double>(K0) * K0) * (j1 * j1 - static_cast<double>(M0) * M0);
  return std::sqrt(num) / (j1 * std::sqrt((2.0 * J + 1.0) * (2.0 * J + 3.0)));
}

Tridiagonal build_cos_matrix(const Subspace& sub) {
  Tridiagonal m;
  const int n = sub.dimension();
  m.diag.resize(static_cast<std::size_t>(n));
  m.off.resize(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n; ++i) {
    const int J = sub.j_at(i);
    m.diag[static_cast<std::size_t>(i)] = cos_diag(J, sub.k0(), sub.m0());
    if (i + 1 < n) m.off[static_cast<std::size_t>(i)] = cos_offdiag(J, sub.k0(), sub.m0());
  }
  return m;
}

double reference_duration(const RotorConstants& constants) {
  return 2.0 * std::numbers::pi / transition_frequency(0, 0, constants, false);
}

}  // namespace symtop
