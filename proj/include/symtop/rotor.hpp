#pragma once

// Symmetric-top rotor: molecular constants, quantum-number bookkeeping,
// eigenenergies and the two closed-form cos(theta) matrix elements
// <J K M| D^1_00 |J' K M> that survive under linear polarization.

#include <string>
#include <vector>

namespace symtop {

/// Prolate symmetric-top constants. Rotational and distortion constants in
/// cm^-1, permanent dipole in Debye.
struct RotorConstants {
  double A = 0.0;
  double C = 0.0;
  double DJ = 0.0;
  double DJK = 0.0;
  double DK = 0.0;
  double mu0 = 0.0;

  /// Throws DomainError unless A > C > 0, all D >= 0 and mu0 > 0.
  void validate() const;

  /// Methyl iodide (CH3I).
  static RotorConstants ch3i();
};

struct RotState {
  int J = 0;
  int K = 0;
  int M = 0;

  /// Throws DomainError unless J >= 0, |K| <= J and |M| <= J.
  void validate() const;
};

/// The J ladder at fixed (K0, M0) coupled by a linearly polarized field.
class Subspace {
 public:
  Subspace() : Subspace(0, 0, 1) {}
  Subspace(int K0, int M0, int j_max);

  int k0() const { return k0_; }
  int m0() const { return m0_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int dimension() const { return j_max_ - j_min_ + 1; }

  bool contains(int J) const { return J >= j_min_ && J <= j_max_; }
  int index_of(int J) const;
  int j_at(int index) const { return j_min_ + index; }

 private:
  int k0_;
  int m0_;
  int j_min_;
  int j_max_;
};

/// Real symmetric tridiagonal matrix stored as diagonal + first off-diagonal.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples rows i and i+1

  int size() const { return static_cast<int>(diag.size()); }
  double at(int row, int col) const;
};

/// Field-free level energies of a subspace, indexed like Subspace::index_of.
struct EnergyLadder {
  std::vector<double> energies;
  bool includes_distortion = false;
};

/// E_JK in cm^-1; the distortion term is added when include_distortion is set.
double eigenenergy(int J, int K, const RotorConstants& constants, bool include_distortion);

/// E_{J0+1,K0} - E_{J0,K0} as an angular frequency (rad/ps).
double transition_frequency(int J0, int K0, const RotorConstants& constants,
                            bool include_distortion);

/// <J K0 M0| cos(theta) |J K0 M0> = K0 M0 / (J (J+1)); zero at J = 0.
double cos_diag(int J, int K0, int M0);

/// <J+1 K0 M0| cos(theta) |J K0 M0>.
double cos_offdiag(int J, int K0, int M0);

Tridiagonal build_cos_matrix(const Subspace& sub);

/// 2 pi / omega_{1,0} for the K = 0 ladder of the rigid rotor, i.e. pi / C.
double reference_duration(const RotorConstants& constants);

}  // namespace symtop
