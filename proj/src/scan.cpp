#include "symtop/scan.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "symtop/errors.hpp"

namespace symtop {
namespace {

double parse_double(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("malformed grid '" + std::string(whole) + "': bad number '" + std::string(text) + "'");
  }
  return value;
}

std::string describe_error() {
  try {
    throw;
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

struct PointOutcome {
  std::optional<PropagationResult> result;
  std::string error;
};

PointOutcome run_point(const RotState& initial, const PulseSpec& pulse, const PropagationConfig& config,
                       const RotorConstants& constants) {
  PointOutcome out;
  try {
    out.result = propagate(initial, pulse, config, constants);
  } catch (...) {
    out.error = describe_error();
  }
  return out;
}

double effective_tau(const ScanOptions& options, const RotorConstants& constants) {
  return options.tau > 0.0 ? options.tau : reference_duration(constants);
}

void add_optional(Table::Row& row, const std::optional<double>& v) {
  if (v) {
    row.add(*v);
  } else {
    row.empty();
  }
}

}  // namespace

std::string_view to_string(ScanKind kind) {
  switch (kind) {
    case ScanKind::extrema_grid: return "extrema_grid";
    case ScanKind::j0_sweep: return "j0_sweep";
    case ScanKind::dynamics: return "dynamics";
    case ScanKind::distortion_compare: return "distortion_compare";
    case ScanKind::robustness_map: return "robustness_map";
    case ScanKind::duration_scan: return "duration_scan";
  }
  return "unknown";
}

std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 1) throw ConfigError("grid count must be >= 1");
  if (count == 1) {
    if (stop != start) throw ConfigError("a one-point grid needs start == stop");
    return {start};
  }
  if (!(stop > start)) throw ConfigError("grid must be strictly increasing (stop > start)");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
  }
  out.back() = stop;
  return out;
}

std::vector<double> parse_real_grid(std::string_view text) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) return {parse_double(text, text)};
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
    throw ConfigError("malformed grid '" + std::string(text) + "': expected start:stop:count");
  }
  const double start = parse_double(text.substr(0, first), text);
  const double stop = parse_double(text.substr(first + 1, second - first - 1), text);
  const auto count_text = text.substr(second + 1);
  int count = 0;
  const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (ec != std::errc() || ptr != count_text.data() + count_text.size()) {
    throw ConfigError("malformed grid '" + std::string(text) + "': bad count");
  }
  return linear_grid(start, stop, count);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, 256));
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::min(threads, count));
  for (std::size_t w = 0; w < std::min(threads, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double enhancement_fidelity(double lambda, double achieved, double baseline) {
  const double gap = lambda - baseline;
  if (std::abs(gap) < 1e-14) {
    throw DomainError("enhancement fidelity undefined: lambda equals the baseline");
  }
  return 1.0 - (lambda - achieved) / gap;
}

double branch_extremum(const PropagationResult& result, Branch branch) {
  return branch == Branch::positive ? result.max_orientation : result.min_orientation;
}

// ---------------------------------------------------------------------------

ExtremaGrid extrema_grid(int J0) {
  if (J0 < 0) throw DomainError("J0 must be >= 0");
  ExtremaGrid grid;
  grid.J0 = J0;
  grid.max_plus = -2.0;
  grid.min_minus = 2.0;
  for (int K0 = -J0; K0 <= J0; ++K0) {
    for (int M0 = -J0; M0 <= J0; ++M0) {
      const auto ext = extrema(J0, K0, M0);
      grid.cells.push_back({K0, M0, ext.lambda_plus, ext.lambda_minus});
      grid.max_plus = std::max(grid.max_plus, ext.lambda_plus);
      grid.min_minus = std::min(grid.min_minus, ext.lambda_minus);
    }
  }
  constexpr double kTie = 1e-12;
  for (const auto& c : grid.cells) {
    if (c.lambda_plus >= grid.max_plus - kTie) grid.argmax_plus.emplace_back(c.K0, c.M0);
    if (c.lambda_minus <= grid.min_minus + kTie) grid.argmin_minus.emplace_back(c.K0, c.M0);
  }
  return grid;
}

Table to_table(const ExtremaGrid& grid) {
  Table t({"J0", "K0", "M0", "lambda_plus", "lambda_minus", "is_argmax_plus", "is_argmin_minus"});
  auto member = [](const std::vector<std::pair<int, int>>& set, int k, int m) {
    return std::find(set.begin(), set.end(), std::make_pair(k, m)) != set.end() ? 1 : 0;
  };
  for (const auto& c : grid.cells) {
    t.row()
        .add(grid.J0)
        .add(c.K0)
        .add(c.M0)
        .add(c.lambda_plus)
        .add(c.lambda_minus)
        .add(member(grid.argmax_plus, c.K0, c.M0))
        .add(member(grid.argmin_minus, c.K0, c.M0));
  }
  return t;
}

// ---------------------------------------------------------------------------

std::string_view to_string(KMCondition condition) {
  switch (condition) {
    case KMCondition::km_zero: return "KM_zero";
    case KMCondition::km_plus_j0sq: return "KM_plus_J0sq";
    case KMCondition::km_minus_j0sq: return "KM_minus_J0sq";
  }
  return "unknown";
}

KMCondition parse_km_condition(std::string_view text) {
  if (text == "KM_zero" || text == "zero") return KMCondition::km_zero;
  if (text == "KM_plus_J0sq" || text == "plus") return KMCondition::km_plus_j0sq;
  if (text == "KM_minus_J0sq" || text == "minus") return KMCondition::km_minus_j0sq;
  throw ConfigError("unknown K0M0 condition '" + std::string(text) + "'");
}

std::pair<int, int> km_for(int J0, KMCondition condition) {
  switch (condition) {
    case KMCondition::km_zero: return {0, 0};
    case KMCondition::km_plus_j0sq: return {J0, J0};
    case KMCondition::km_minus_j0sq: return {J0, -J0};
  }
  return {0, 0};
}

std::vector<SweepRow> j0_sweep(int first, int last, KMCondition condition,
                               const RotorConstants& constants, const ScanOptions* propagation) {
  if (first < 0 || last < first) throw DomainError("J0 sweep needs 0 <= first <= last");
  std::vector<SweepRow> rows;
  for (int J0 = first; J0 <= last; ++J0) {
    const auto [K0, M0] = km_for(J0, condition);
    const auto ext = extrema(J0, K0, M0);
    rows.push_back({J0, K0, M0, ext.lambda_plus, ext.lambda_minus, cos_diag(J0, K0, M0), {}, {}, {}});
  }
  if (propagation == nullptr) return rows;

  const Branch branch = condition == KMCondition::km_minus_j0sq ? Branch::negative : Branch::positive;
  const double tau = effective_tau(*propagation, constants);
  parallel_for(rows.size(), propagation->workers, [&](std::size_t i) {
    auto& row = rows[i];
    try {
      const auto design = design_two_state(row.J0, row.K0, row.M0, branch);
      const auto pulse = design_gaussian_pulse(design, tau, propagation->phi, constants, propagation->resonance);
      const auto r = propagate({row.J0, row.K0, row.M0}, pulse, propagation->propagation, constants);
      row.propagated_max = r.max_orientation;
      row.propagated_min = r.min_orientation;
    } catch (...) {
      row.error = describe_error();
    }
  });
  return rows;
}

Table to_table(std::span<const SweepRow> rows) {
  Table t({"J0", "K0", "M0", "lambda_plus", "lambda_minus", "baseline", "propagated_max",
           "propagated_min", "error"});
  for (const auto& r : rows) {
    auto& row = t.row().add(r.J0).add(r.K0).add(r.M0).add(r.lambda_plus).add(r.lambda_minus).add(r.baseline);
    add_optional(row, r.propagated_max);
    add_optional(row, r.propagated_min);
    row.add(r.error);
  }
  return t;
}

// ---------------------------------------------------------------------------

std::vector<DynamicsItem> dynamics_suite(std::span<const int> j0_list, Branch branch,
                                         const RotorConstants& constants, const ScanOptions& options) {
  std::vector<DynamicsItem> items(j0_list.size());
  const double tau = effective_tau(options, constants);
  parallel_for(items.size(), options.workers, [&](std::size_t i) {
    auto& item = items[i];
    const int J0 = j0_list[i];
    item.design.J0 = J0;
    item.design.K0 = J0;
    item.design.M0 = branch == Branch::positive ? J0 : -J0;
    item.design.branch = branch;
    try {
      item.design = design_two_state(J0, item.design.K0, item.design.M0, branch);
      item.pulse = design_gaussian_pulse(item.design, tau, options.phi, constants, options.resonance);
      auto outcome = run_point({J0, item.design.K0, item.design.M0}, item.pulse, options.propagation, constants);
      item.error = std::move(outcome.error);
      if (outcome.result) {
        FidelityRecord f{J0, item.design.K0, item.design.M0, branch, item.design.lambda,
                         branch_extremum(*outcome.result, branch), cos_diag(J0, item.design.K0, item.design.M0), 0.0};
        f.eta = enhancement_fidelity(f.lambda, f.achieved, f.baseline);
        item.fidelity = f;
        item.result = std::move(outcome.result);
      }
    } catch (...) {
      item.error = describe_error();
    }
  });
  return items;
}

Table to_table(std::span<const DynamicsItem> items) {
  Table t({"J0", "K0", "M0", "branch", "lambda", "max_orientation", "min_orientation", "pop_J0",
           "pop_J0_plus_1", "eta", "norm_drift", "error"});
  for (const auto& it : items) {
    auto& row = t.row()
                    .add(it.design.J0)
                    .add(it.design.K0)
                    .add(it.design.M0)
                    .add(std::string(to_string(it.design.branch)))
                    .add(it.design.lambda);
    if (it.result) {
      const auto& r = *it.result;
      row.add(r.max_orientation)
          .add(r.min_orientation)
          .add(r.final_packet.population(it.design.J0))
          .add(r.final_packet.population(it.design.J0 + 1));
      add_optional(row, it.fidelity ? std::optional<double>(it.fidelity->eta) : std::nullopt);
      row.add(r.norm_drift);
    } else {
      row.empty().empty().empty().empty().empty().empty();
    }
    row.add(it.error);
  }
  return t;
}

// ---------------------------------------------------------------------------

std::optional<double> DistortionRow::difference() const {
  if (max_full && max_rigid) return *max_full - *max_rigid;
  return std::nullopt;
}

std::vector<DistortionRow> distortion_compare(int first, int last, Branch branch,
                                              const RotorConstants& constants,
                                              const ScanOptions& options) {
  if (first < 0 || last < first) throw DomainError("J0 range needs 0 <= first <= last");
  const double tau = effective_tau(options, constants);
  std::vector<DistortionRow> rows;
  for (int J0 = first; J0 <= last; ++J0) {
    rows.push_back({J0, J0, branch == Branch::positive ? J0 : -J0, branch, {}, {}, 0.0, {}});
  }
  // Two tasks per J0: index 2i runs the full model, 2i+1 the rigid one.
  std::vector<PointOutcome> outcomes(2 * rows.size());
  std::vector<std::string> design_errors(rows.size());
  parallel_for(outcomes.size(), options.workers, [&](std::size_t k) {
    const auto& row = rows[k / 2];
    try {
      const auto design = design_two_state(row.J0, row.K0, row.M0, branch);
      const auto pulse = design_gaussian_pulse(design, tau, options.phi, constants, options.resonance);
      auto config = options.propagation;
      config.include_distortion = (k % 2 == 0);
      outcomes[k] = run_point({row.J0, row.K0, row.M0}, pulse, config, constants);
    } catch (...) {
      outcomes[k].error = describe_error();
    }
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    const auto& full = outcomes[2 * i];
    const auto& rigid = outcomes[2 * i + 1];
    if (full.result) row.max_full = branch_extremum(*full.result, branch);
    if (rigid.result) row.max_rigid = branch_extremum(*rigid.result, branch);
    for (const auto* o : {&full, &rigid}) {
      if (o->result) row.norm_drift = std::max(row.norm_drift, o->result->norm_drift);
    }
    if (!full.error.empty()) row.error = "full: " + full.error;
    if (!rigid.error.empty()) row.error += (row.error.empty() ? "" : "; ") + std::string("rigid: ") + rigid.error;
  }
  return rows;
}

Table to_table(std::span<const DistortionRow> rows) {
  Table t({"J0", "K0", "M0", "branch", "max_full", "max_rigid", "difference", "error"});
  for (const auto& r : rows) {
    auto& row = t.row().add(r.J0).add(r.K0).add(r.M0).add(std::string(to_string(r.branch)));
    add_optional(row, r.max_full);
    add_optional(row, r.max_rigid);
    add_optional(row, r.difference());
    row.add(r.error);
  }
  return t;
}

// ---------------------------------------------------------------------------

std::size_t RobustnessMap::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const RobustnessCell& c) { return !c.eta.has_value(); }));
}

namespace {

void require_increasing(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError(std::string(name) + " grid must be strictly increasing");
  }
}

}  // namespace

RobustnessMap robustness_map(int J0, int K0, int M0, std::span<const double> eps1_grid,
                             std::span<const double> eps2_grid, Branch branch,
                             const RotorConstants& constants, const ScanOptions& options) {
  require_increasing(eps1_grid, "eps1");
  require_increasing(eps2_grid, "eps2");
  const auto design = design_two_state(J0, K0, M0, branch);
  const auto nominal =
      design_gaussian_pulse(design, effective_tau(options, constants), options.phi, constants, options.resonance);

  RobustnessMap map;
  map.J0 = J0;
  map.K0 = K0;
  map.M0 = M0;
  map.branch = branch;
  map.lambda = design.lambda;
  map.baseline = cos_diag(J0, K0, M0);
  map.eps1.assign(eps1_grid.begin(), eps1_grid.end());
  map.eps2.assign(eps2_grid.begin(), eps2_grid.end());
  map.cells.resize(map.eps1.size() * map.eps2.size());

  parallel_for(map.cells.size(), options.workers, [&](std::size_t k) {
    auto& cell = map.cells[k];
    cell.eps1 = map.eps1[k / map.eps2.size()];
    cell.eps2 = map.eps2[k % map.eps2.size()];
    try {
      const auto pulse = apply_perturbation(nominal, cell.eps1, cell.eps2);
      const auto r = propagate({J0, K0, M0}, pulse, options.propagation, constants);
      cell.achieved = branch_extremum(r, branch);
      cell.eta = enhancement_fidelity(map.lambda, *cell.achieved, map.baseline);
      cell.norm_drift = r.norm_drift;
    } catch (...) {
      cell.error = describe_error();
    }
  });
  return map;
}

Table to_table(const RobustnessMap& map) {
  Table t({"eps1", "eps2", "achieved", "eta", "error"});
  for (const auto& c : map.cells) {
    auto& row = t.row().add(c.eps1).add(c.eps2);
    add_optional(row, c.achieved);
    add_optional(row, c.eta);
    row.add(c.error);
  }
  return t;
}

// ---------------------------------------------------------------------------

DurationScan duration_scan(int J0, int K0, int M0, std::span<const double> tau_units, Branch branch,
                           const RotorConstants& constants, const ScanOptions& options) {
  require_increasing(tau_units, "tau");
  if (!(tau_units.front() > 0.0)) throw DomainError("tau grid must be positive");
  const auto design = design_two_state(J0, K0, M0, branch);
  const double tau0 = reference_duration(constants);

  DurationScan scan;
  scan.J0 = J0;
  scan.K0 = K0;
  scan.M0 = M0;
  scan.branch = branch;
  scan.lambda = design.lambda;
  scan.rows.resize(tau_units.size());

  parallel_for(scan.rows.size(), options.workers, [&](std::size_t i) {
    auto& row = scan.rows[i];
    row.tau_units = tau_units[i];
    row.tau_ps = tau_units[i] * tau0;
    try {
      const auto pulse = design_gaussian_pulse(design, row.tau_ps, options.phi, constants, options.resonance);
      const auto r = propagate({J0, K0, M0}, pulse, options.propagation, constants);
      row.achieved = branch_extremum(r, branch);
      row.norm_drift = r.norm_drift;
    } catch (...) {
      row.error = describe_error();
    }
  });

  for (const auto& row : scan.rows) {
    if (row.achieved && std::abs(*row.achieved - scan.lambda) <= kDurationTolerance) {
      scan.min_sufficient_tau_units = row.tau_units;
      break;
    }
  }
  return scan;
}

Table to_table(const DurationScan& scan) {
  Table t({"tau_units", "tau_ps", "max_orientation", "error"});
  for (const auto& r : scan.rows) {
    auto& row = t.row().add(r.tau_units).add(r.tau_ps);
    add_optional(row, r.achieved);
    row.add(r.error);
  }
  return t;
}

}  // namespace symtop
