#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "symtop/errors.hpp"
#include "symtop/keyvalue.hpp"
#include "symtop/molecule_io.hpp"
#include "symtop/table.hpp"
#include "symtop/units.hpp"

using namespace symtop;
using doctest::Approx;

TEST_SUITE("units") {
  TEST_CASE("wavenumber to angular frequency") {
    CHECK(units::kCm1ToRadPerPs == Approx(0.18836515673088532).epsilon(1e-15));
    CHECK(units::cm1_to_internal(2.0) == Approx(2.0 * oracle::kTwoPiC).epsilon(1e-15));
    CHECK(units::internal_to_cm1(units::cm1_to_internal(0.25098)) == Approx(0.25098).epsilon(1e-15));
  }

  TEST_CASE("dipole coupling constant") {
    // 1 Debye in a 1 V/m field, in rad/ps.
    CHECK(units::kDebyeFieldToRadPerPs == Approx(3.3356409519815e-30 / 1.054571817e-34 * 1e-12).epsilon(1e-12));
    CHECK(units::kDebyeFieldToRadPerPs == Approx(3.16303e-8).epsilon(1e-5));
  }

  TEST_CASE("conversions within a dimension") {
    using units::Unit;
    CHECK(units::convert(1.0, Unit::Gigahertz, Unit::Hertz) == Approx(1e9));
    CHECK(units::convert(1.0, Unit::InverseCentimeter, Unit::Gigahertz) == Approx(29.9792458).epsilon(1e-12));
    CHECK(units::convert(1.0, Unit::Nanosecond, Unit::Picosecond) == Approx(1000.0));
    CHECK(units::convert(3.0, Unit::Second, Unit::Second) == 3.0);
    const double x = units::convert(0.7, Unit::RadianPerSecond, Unit::InverseCentimeter);
    CHECK(units::convert(x, Unit::InverseCentimeter, Unit::RadianPerSecond) == Approx(0.7).epsilon(1e-14));
  }

  TEST_CASE("unit names") {
    using units::Unit;
    for (auto u : {Unit::InverseCentimeter, Unit::RadianPerPicosecond, Unit::RadianPerSecond, Unit::Hertz,
                   Unit::Gigahertz, Unit::DebyeVoltPerMeter, Unit::Second, Unit::Nanosecond, Unit::Picosecond}) {
      CHECK(units::parse_unit(units::unit_name(u)) == u);
    }
    CHECK(units::parse_unit("1/cm") == Unit::InverseCentimeter);
    CHECK_THROWS_AS(units::parse_unit("furlong"), ConfigError);
    CHECK_THROWS_AS(units::convert(1.0, Unit::Picosecond, Unit::Hertz), ConfigError);
  }
}

TEST_SUITE("io") {
  TEST_CASE("key-value documents") {
    std::istringstream in(
        "# comment\n"
        "top = 1\n"
        "\n"
        "[alpha]\n"
        "x = 2   # trailing\n"
        "x = 3\n"
        "[beta]\n"
        "path = a b c\n");
    const auto doc = KeyValueDocument::parse(in);
    CHECK(doc.find("", "top") == "1");
    CHECK(doc.find("alpha", "x") == "3");
    CHECK(doc.find("beta", "path") == "a b c");
    CHECK_FALSE(doc.find("beta", "x").has_value());
    CHECK(doc.has_section("alpha"));
    CHECK_FALSE(doc.has_section("gamma"));
    CHECK(doc.section("alpha").size() == 2);
  }

  TEST_CASE("malformed key-value lines name the line") {
    std::istringstream a("ok = 1\nnot a pair\n");
    try {
      KeyValueDocument::parse(a);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream b("[unclosed\n");
    CHECK_THROWS_AS(KeyValueDocument::parse(b), ConfigError);
    std::istringstream c(" = 4\n");
    CHECK_THROWS_AS(KeyValueDocument::parse(c), ConfigError);
    CHECK_THROWS_AS(KeyValueDocument::load("/nonexistent/file.txt"), ConfigError);
  }

  TEST_CASE("molecule round trip") {
    const auto c = RotorConstants::ch3i();
    std::ostringstream os;
    write_molecule(os, c);
    std::istringstream is(os.str());
    const auto back = read_molecule(is);
    CHECK(back.A == c.A);
    CHECK(back.C == c.C);
    CHECK(back.DJ == c.DJ);
    CHECK(back.DJK == c.DJK);
    CHECK(back.DK == c.DK);
    CHECK(back.mu0 == c.mu0);
  }

  TEST_CASE("molecule section takes precedence") {
    std::istringstream is(
        "A_cm1 = 99\n"
        "[molecule]\n"
        "A_cm1 = 5\nC_cm1 = 0.5\nDJ_cm1 = 0\nDJK_cm1 = 0\nDK_cm1 = 0\nmu0_debye = 1\n");
    const auto c = read_molecule(is);
    CHECK(c.A == 5.0);
    CHECK(c.C == 0.5);
  }

  TEST_CASE("invalid molecule files") {
    std::istringstream missing("A_cm1 = 5\n");
    CHECK_THROWS_AS(read_molecule(missing), ConfigError);
    std::istringstream garbage("A_cm1 = five\nC_cm1 = 1\nDJ_cm1 = 0\nDJK_cm1 = 0\nDK_cm1 = 0\nmu0_debye = 1\n");
    CHECK_THROWS_AS(read_molecule(garbage), ConfigError);
    std::istringstream oblate("A_cm1 = 0.1\nC_cm1 = 1\nDJ_cm1 = 0\nDJK_cm1 = 0\nDK_cm1 = 0\nmu0_debye = 1\n");
    CHECK_THROWS_AS(read_molecule(oblate), ConfigError);
    CHECK_THROWS_AS(resolve_molecule("/nonexistent/molecule.txt"), ConfigError);
  }

  TEST_CASE("shipped preset file matches the built-in constants") {
    const auto file = load_molecule(SYMTOP_DATA_DIR "/molecules/ch3i.txt");
    const auto builtin = resolve_molecule("ch3i");
    CHECK(file.A == builtin.A);
    CHECK(file.C == builtin.C);
    CHECK(file.DJ == builtin.DJ);
    CHECK(file.DJK == builtin.DJK);
    CHECK(file.DK == builtin.DK);
    CHECK(file.mu0 == builtin.mu0);
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.5773502691896258) == "0.57735026919");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(66.452325922016115) == "66.452325922");
  }

  TEST_CASE("tables") {
    Table t({"a", "b", "c"});
    t.row().add(1).add(0.25).add("x, y\nz");
    t.row().add(2).empty().add("ok");
    CHECK(t.rows() == 2);
    CHECK(t.str() == "a,b,c\n1,0.25,x; y;z\n2,,ok\n");
    t.row().add(3);
    CHECK_THROWS_AS(t.str(), Error);
  }
}
