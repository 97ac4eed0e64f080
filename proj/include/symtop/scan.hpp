#pragma once

// Parameter sweeps: extrema grids, J0 sweeps, designed-pulse dynamics,
// distortion comparison, (eps1, eps2) robustness maps and duration scans.
// Grid points run on a worker pool and are merged in index order, so results
// do not depend on the worker count.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symtop/propagator.hpp"
#include "symtop/pulse_design.hpp"
#include "symtop/table.hpp"

namespace symtop {

enum class ScanKind { extrema_grid, j0_sweep, dynamics, distortion_compare, robustness_map, duration_scan };

std::string_view to_string(ScanKind kind);

/// Shared settings for every propagated scan point.
struct ScanOptions {
  PropagationConfig propagation;
  ResonanceModel resonance = ResonanceModel::distortion_corrected;
  double phi = kDefaultPhase;
  double tau = 0.0;  // ps; 0 selects tau_0
  int workers = 1;
};

/// Parses "start:stop:count" into count evenly spaced values. A single number
/// is a one-point grid. Throws ConfigError unless the grid is strictly increasing.
std::vector<double> parse_real_grid(std::string_view text);
std::vector<double> linear_grid(double start, double stop, int count);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct FidelityRecord {
  int J0 = 0;
  int K0 = 0;
  int M0 = 0;
  Branch branch = Branch::positive;
  double lambda = 0.0;
  double achieved = 0.0;
  double baseline = 0.0;
  double eta = 0.0;
};

/// 1 - (lambda - achieved) / (lambda - baseline). Throws DomainError when
/// lambda equals the baseline.
double enhancement_fidelity(double lambda, double achieved, double baseline);

/// Max of the trace for the positive branch, min for the negative one.
double branch_extremum(const PropagationResult& result, Branch branch);

// ---------------------------------------------------------------------------

struct ExtremaCell {
  int K0 = 0;
  int M0 = 0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

struct ExtremaGrid {
  int J0 = 0;
  std::vector<ExtremaCell> cells;  // K0 major, M0 minor, both ascending
  double max_plus = 0.0;
  double min_minus = 0.0;
  std::vector<std::pair<int, int>> argmax_plus;   // every (K0, M0) attaining max_plus
  std::vector<std::pair<int, int>> argmin_minus;  // every (K0, M0) attaining min_minus
};

ExtremaGrid extrema_grid(int J0);
Table to_table(const ExtremaGrid& grid);

// ---------------------------------------------------------------------------

enum class KMCondition { km_zero, km_plus_j0sq, km_minus_j0sq };

std::string_view to_string(KMCondition condition);
KMCondition parse_km_condition(std::string_view text);
/// (K0, M0) for J0 under the condition.
std::pair<int, int> km_for(int J0, KMCondition condition);

struct SweepRow {
  int J0 = 0;
  int K0 = 0;
  int M0 = 0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double baseline = 0.0;
  std::optional<double> propagated_max;
  std::optional<double> propagated_min;
  std::string error;
};

/// Analytic columns for J0 in [first, last]; when `propagation` is given each
/// row also carries the designed-pulse trace extrema (negative branch for
/// km_minus_j0sq, positive otherwise).
std::vector<SweepRow> j0_sweep(int first, int last, KMCondition condition,
                               const RotorConstants& constants,
                               const ScanOptions* propagation = nullptr);
Table to_table(std::span<const SweepRow> rows);

// ---------------------------------------------------------------------------

struct DynamicsItem {
  TwoStateDesign design;
  PulseSpec pulse;
  std::optional<PropagationResult> result;
  std::optional<FidelityRecord> fidelity;
  std::string error;
};

/// One designed pulse and propagation per J0 with K0 = J0 and M0 = +-J0 by
/// branch. A failing item records its error and the suite continues.
std::vector<DynamicsItem> dynamics_suite(std::span<const int> j0_list, Branch branch,
                                         const RotorConstants& constants, const ScanOptions& options);
Table to_table(std::span<const DynamicsItem> items);

// ---------------------------------------------------------------------------

struct DistortionRow {
  int J0 = 0;
  int K0 = 0;
  int M0 = 0;
  Branch branch = Branch::positive;
  std::optional<double> max_full;
  std::optional<double> max_rigid;
  double norm_drift = 0.0;  // worst of the two propagations
  std::string error;

  std::optional<double> difference() const;
};

/// The same designed pulse applied with and without centrifugal distortion in
/// the field-free Hamiltonian. Columns hold the branch's signed extremum.
std::vector<DistortionRow> distortion_compare(int first, int last, Branch branch,
                                              const RotorConstants& constants,
                                              const ScanOptions& options);
Table to_table(std::span<const DistortionRow> rows);

// ---------------------------------------------------------------------------

struct RobustnessCell {
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::optional<double> achieved;
  std::optional<double> eta;
  double norm_drift = 0.0;
  std::string error;
};

struct RobustnessMap {
  int J0 = 0;
  int K0 = 0;
  int M0 = 0;
  Branch branch = Branch::positive;
  double lambda = 0.0;
  double baseline = 0.0;
  std::vector<double> eps1;
  std::vector<double> eps2;
  std::vector<RobustnessCell> cells;  // eps1 major, eps2 minor

  const RobustnessCell& at(std::size_t i1, std::size_t i2) const { return cells[i1 * eps2.size() + i2]; }
  std::size_t failures() const;
};

RobustnessMap robustness_map(int J0, int K0, int M0, std::span<const double> eps1_grid,
                             std::span<const double> eps2_grid, Branch branch,
                             const RotorConstants& constants, const ScanOptions& options);
Table to_table(const RobustnessMap& map);

// ---------------------------------------------------------------------------

inline constexpr double kDurationTolerance = 0.005;

struct DurationRow {
  double tau_units = 0.0;  // multiples of tau_0
  double tau_ps = 0.0;
  std::optional<double> achieved;
  double norm_drift = 0.0;
  std::string error;
};

struct DurationScan {
  int J0 = 0;
  int K0 = 0;
  int M0 = 0;
  Branch branch = Branch::positive;
  double lambda = 0.0;
  std::vector<DurationRow> rows;
  /// Smallest tau (in tau_0) whose extremum lies within kDurationTolerance of lambda.
  std::optional<double> min_sufficient_tau_units;
};

DurationScan duration_scan(int J0, int K0, int M0, std::span<const double> tau_units,
                           Branch branch, const RotorConstants& constants, const ScanOptions& options);
Table to_table(const DurationScan& scan);

}  // namespace symtop
