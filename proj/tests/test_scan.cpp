#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>

#include "symtop/errors.hpp"
#include "symtop/scan.hpp"

using namespace symtop;
using doctest::Approx;

namespace {
const RotorConstants kCh3i = RotorConstants::ch3i();
}

TEST_SUITE("scan") {
  TEST_CASE("real grids") {
    const auto g = parse_real_grid("-0.15:0.15:7");
    REQUIRE(g.size() == 7);
    CHECK(g.front() == -0.15);
    CHECK(g.back() == 0.15);
    CHECK(g[3] == Approx(0.0).epsilon(1e-15));
    CHECK(parse_real_grid("0.25") == std::vector<double>{0.25});
    CHECK(parse_real_grid("0.5:0.5:1") == std::vector<double>{0.5});
    CHECK(linear_grid(0.1, 2.0, 20)[9] == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(parse_real_grid("1:0:3"), ConfigError);
    CHECK_THROWS_AS(parse_real_grid("0:1:1"), ConfigError);
    CHECK_THROWS_AS(parse_real_grid("0:1"), ConfigError);
    CHECK_THROWS_AS(parse_real_grid("a:b:3"), ConfigError);
    CHECK_THROWS_AS(parse_real_grid(""), ConfigError);
    CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0), ConfigError);
  }

  TEST_CASE("worker pool visits every index once") {
    for (int workers : {1, 3, 16}) {
      std::vector<std::atomic<int>> hits(101);
      parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
      for (auto& h : hits) CHECK(h.load() == 1);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
  }

  TEST_CASE("enhancement fidelity") {
    CHECK(enhancement_fidelity(0.827, 0.827, 2.0 / 3.0) == 1.0);
    CHECK(enhancement_fidelity(0.827, 2.0 / 3.0, 2.0 / 3.0) == Approx(0.0).epsilon(1e-15));
    CHECK(enhancement_fidelity(0.827, 0.747, 2.0 / 3.0) == Approx(0.5).epsilon(0.005));
    CHECK(enhancement_fidelity(0.8, 0.7, 0.6) == Approx(0.5).epsilon(1e-12));
    // Negative branch: lambda and the trace minimum enter symmetrically.
    CHECK(enhancement_fidelity(-0.8, -0.7, -0.6) == Approx(0.5).epsilon(1e-12));
    CHECK(enhancement_fidelity(-0.8, -0.8, -0.6) == 1.0);
    CHECK(enhancement_fidelity(0.8, 0.9, 0.6) > 1.0);
    CHECK_THROWS_AS(enhancement_fidelity(0.5, 0.4, 0.5), DomainError);
  }

  TEST_CASE("extrema grid") {
    const auto g0 = extrema_grid(0);
    REQUIRE(g0.cells.size() == 1);
    CHECK(g0.cells[0].lambda_plus == Approx(0.57735026919).epsilon(1e-11));
    const auto g2 = extrema_grid(2);
    CHECK(g2.cells.size() == 25);
    CHECK(g2.max_plus == Approx(0.827).epsilon(5e-4));
    CHECK(g2.argmax_plus == std::vector<std::pair<int, int>>{{-2, -2}, {2, 2}});
    CHECK(g2.argmin_minus == std::vector<std::pair<int, int>>{{-2, 2}, {2, -2}});
    const auto g5 = extrema_grid(5);
    CHECK(g5.min_minus == Approx(-0.908).epsilon(5e-4));
    CHECK_THROWS_AS(extrema_grid(-1), DomainError);
    const auto t = to_table(g2);
    CHECK(t.columns() ==
          std::vector<std::string>{"J0", "K0", "M0", "lambda_plus", "lambda_minus", "is_argmax_plus", "is_argmin_minus"});
    CHECK(t.rows() == 25);
  }

  TEST_CASE("extrema grid symmetry") {
    for (int J0 = 1; J0 <= 6; ++J0) {
      const auto g = extrema_grid(J0);
      const int side = 2 * J0 + 1;
      auto cell = [&](int K, int M) { return g.cells[static_cast<std::size_t>((K + J0) * side + (M + J0))]; };
      for (int K = -J0; K <= J0; ++K) {
        for (int M = -J0; M <= J0; ++M) {
          CHECK(cell(K, M).K0 == K);
          CHECK(cell(K, M).M0 == M);
          CHECK(cell(-K, -M).lambda_plus == Approx(cell(K, M).lambda_plus).epsilon(1e-14));
          CHECK(cell(K, -M).lambda_plus == Approx(-cell(K, M).lambda_minus).epsilon(1e-14));
        }
      }
    }
  }

  TEST_CASE("K0 M0 conditions") {
    CHECK(km_for(4, KMCondition::km_zero) == std::pair{0, 0});
    CHECK(km_for(4, KMCondition::km_plus_j0sq) == std::pair{4, 4});
    CHECK(km_for(4, KMCondition::km_minus_j0sq) == std::pair{4, -4});
    CHECK(parse_km_condition("KM_plus_J0sq") == KMCondition::km_plus_j0sq);
    CHECK(parse_km_condition(to_string(KMCondition::km_zero)) == KMCondition::km_zero);
    CHECK_THROWS_AS(parse_km_condition("KM_any"), ConfigError);
  }

  TEST_CASE("analytic J0 sweep") {
    const auto zero = j0_sweep(0, 130, KMCondition::km_zero, kCh3i);
    REQUIRE(zero.size() == 131);
    CHECK(zero.back().lambda_plus == Approx(0.5).epsilon(0.01));
    CHECK(zero.back().lambda_plus > 0.5);
    const auto plus = j0_sweep(0, 130, KMCondition::km_plus_j0sq, kCh3i);
    for (std::size_t i = 1; i < plus.size(); ++i) CHECK(plus[i].lambda_plus > plus[i - 1].lambda_plus);
    for (const auto& row : plus) {
      CHECK(row.baseline == Approx(row.J0 / (row.J0 + 1.0)).epsilon(1e-14));
      CHECK_FALSE(row.propagated_max.has_value());
    }
    CHECK(plus[98].baseline < 0.99);
    CHECK(plus[99].baseline >= 0.99);
    const auto t = to_table(plus);
    CHECK(t.columns().size() == 9);
    CHECK_THROWS_AS(j0_sweep(3, 2, KMCondition::km_zero, kCh3i), DomainError);
  }

  TEST_CASE("propagated J0 sweep") {
    ScanOptions o;
    const auto rows = j0_sweep(0, 2, KMCondition::km_minus_j0sq, kCh3i, &o);
    for (const auto& r : rows) {
      CHECK(r.error.empty());
      REQUIRE(r.propagated_min.has_value());
      CHECK(std::abs(*r.propagated_min - r.lambda_minus) < 0.005);
    }
  }

  TEST_CASE("dynamics suite") {
    ScanOptions o;
    CHECK(dynamics_suite({}, Branch::positive, kCh3i, o).empty());
    const std::vector<int> list{0, 2};
    const auto items = dynamics_suite(list, Branch::positive, kCh3i, o);
    REQUIRE(items.size() == 2);
    for (const auto& item : items) {
      CHECK(item.error.empty());
      REQUIRE(item.fidelity.has_value());
      CHECK(item.fidelity->eta >= 0.99);
      CHECK(item.design.K0 == item.design.J0);
    }
    CHECK(to_table(std::span<const DynamicsItem>(items)).rows() == 2);
  }

  TEST_CASE("dynamics suite isolates failing items") {
    ScanOptions o;
    const std::vector<int> list{0, -1};
    const auto items = dynamics_suite(list, Branch::positive, kCh3i, o);
    REQUIRE(items.size() == 2);
    CHECK(items[0].error.empty());
    CHECK(items[0].result.has_value());
    CHECK_FALSE(items[1].error.empty());
    CHECK_FALSE(items[1].result.has_value());
    const auto table = to_table(std::span<const DynamicsItem>(items)).str();
    CHECK(table.find("invalid quantum numbers") != std::string::npos);
  }

  TEST_CASE("distortion comparison") {
    ScanOptions o;
    const auto rows = distortion_compare(0, 1, Branch::positive, kCh3i, o);
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[0].difference().has_value());
    CHECK(std::abs(*rows[0].difference()) < 1e-4);

    auto rigid_molecule = kCh3i;
    rigid_molecule.DJ = rigid_molecule.DJK = rigid_molecule.DK = 0.0;
    const auto same = distortion_compare(3, 3, Branch::negative, rigid_molecule, o);
    REQUIRE(same[0].difference().has_value());
    CHECK(std::abs(*same[0].difference()) < 1e-12);
    CHECK(same[0].M0 == -3);
    CHECK_THROWS_AS(distortion_compare(2, 1, Branch::positive, kCh3i, o), DomainError);
  }

  TEST_CASE("robustness map") {
    ScanOptions o;
    o.workers = 2;
    const std::vector<double> e1{-0.05, 0.0, 0.05};
    const std::vector<double> e2{0.0};
    const auto map = robustness_map(0, 0, 0, e1, e2, Branch::positive, kCh3i, o);
    REQUIRE(map.cells.size() == 3);
    CHECK(map.failures() == 0);
    CHECK(*map.at(1, 0).eta >= 0.99);
    CHECK(*map.at(0, 0).eta < *map.at(1, 0).eta);
    CHECK(*map.at(2, 0).eta < *map.at(1, 0).eta);
    CHECK(map.at(2, 0).eps1 == 0.05);
    const auto t = to_table(map);
    CHECK(t.columns() == std::vector<std::string>{"eps1", "eps2", "achieved", "eta", "error"});
    CHECK_THROWS_AS(robustness_map(0, 0, 0, std::vector<double>{0.1, 0.0}, e2, Branch::positive, kCh3i, o),
                    DomainError);
  }

  TEST_CASE("robustness map records failing cells") {
    ScanOptions o;
    o.propagation.jmax_buffer = 5;
    o.tau = 0.05 * reference_duration(kCh3i);
    const std::vector<double> e1{0.0};
    const std::vector<double> e2{-0.5, 100.0};
    const auto map = robustness_map(0, 0, 0, e1, e2, Branch::positive, kCh3i, o);
    CHECK(map.failures() == 1);
    CHECK(map.at(0, 0).eta.has_value());
    CHECK_FALSE(map.at(0, 1).eta.has_value());
    CHECK_FALSE(map.at(0, 1).error.empty());
  }

  TEST_CASE("fidelity stays at one for unperturbed designs") {
    ScanOptions o;
    const std::vector<double> zero{0.0};
    for (int J0 : {0, 1, 3, 6, 10}) {
      const auto map = robustness_map(J0, J0, J0, zero, zero, Branch::positive, kCh3i, o);
      REQUIRE(map.at(0, 0).eta.has_value());
      CHECK(*map.at(0, 0).eta >= 0.99);
      // Coupling to J0+2 lets the propagated extremum exceed the two-state
      // bound by a few 1e-7; the ratio stays within 1e-5 of one.
      CHECK(*map.at(0, 0).eta <= 1.0 + 1e-5);
    }
  }

  TEST_CASE("duration scan") {
    ScanOptions o;
    const std::vector<double> taus{0.1, 0.2, 1.0};
    const auto scan = duration_scan(0, 0, 0, taus, Branch::positive, kCh3i, o);
    REQUIRE(scan.rows.size() == 3);
    CHECK(*scan.rows[0].achieved < scan.lambda - kDurationTolerance);
    CHECK(std::abs(*scan.rows[2].achieved - scan.lambda) < kDurationTolerance);
    REQUIRE(scan.min_sufficient_tau_units.has_value());
    CHECK(*scan.min_sufficient_tau_units == 1.0);
    CHECK(scan.rows[2].tau_ps == Approx(reference_duration(kCh3i)));
    CHECK_THROWS_AS(duration_scan(0, 0, 0, std::vector<double>{-0.1, 0.5}, Branch::positive, kCh3i, o),
                    DomainError);
  }

  TEST_CASE("scan output does not depend on the worker count") {
    ScanOptions one;
    ScanOptions many;
    many.workers = 4;
    const std::vector<double> e1{-0.1, 0.0, 0.1};
    const std::vector<double> e2{-0.2, 0.2};
    const auto a = to_table(robustness_map(1, 1, 1, e1, e2, Branch::positive, kCh3i, one)).str();
    const auto b = to_table(robustness_map(1, 1, 1, e1, e2, Branch::positive, kCh3i, many)).str();
    const auto c = to_table(robustness_map(1, 1, 1, e1, e2, Branch::positive, kCh3i, many)).str();
    CHECK(a == b);
    CHECK(b == c);
  }
}
