#include <doctest.h>

#include <cmath>

#include "emspec/circuit.hpp"
#include "emspec/constants.hpp"
#include "emspec/errors.hpp"
#include "emspec/rng.hpp"

using namespace emspec;

namespace {
const CircuitDesign kPaperDesign{11e-9, 33e-15, 17};
}

TEST_CASE("resonator frequency from the device design") {
  const double f = resonator_frequency(kPaperDesign) / kTwoPi;
  CHECK(f == doctest::Approx(8.35347e9).epsilon(1e-4));
  // measured sweet spot 8.31 GHz; design value lands within 1%
  CHECK(std::abs(f - 8.31e9) / 8.31e9 < 0.01);

  CircuitDesign four_l = kPaperDesign;
  four_l.inductance *= 4;
  CHECK(resonator_frequency(four_l) ==
        doctest::Approx(resonator_frequency(kPaperDesign) / 2).epsilon(1e-12));

  CHECK(resonator_frequency({1.0, 1.0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("impedance") {
  CHECK(impedance(kPaperDesign) == doctest::Approx(577.3502691896).epsilon(1e-10));
  CHECK(std::abs(impedance(kPaperDesign) - 580.0) / 580.0 < 0.01);
  CHECK(impedance({1e-9, 1e-9, 1}) == doctest::Approx(1.0));

  CircuitDesign doubled = kPaperDesign;
  doubled.inductance *= 2;
  doubled.capacitance *= 2;
  CHECK(impedance(doubled) == doctest::Approx(impedance(kPaperDesign)).epsilon(1e-12));
}

TEST_CASE("kerr anharmonicity") {
  const double chi = kerr_anharmonicity(kPaperDesign) / kTwoPi;
  CHECK(chi == doctest::Approx(-2.031061e6).epsilon(1e-5));
  CHECK(std::abs(chi - (-2.0e6)) / 2.0e6 < 0.03);

  CircuitDesign more_squids = kPaperDesign;
  more_squids.squid_count *= 2;
  CHECK(kerr_anharmonicity(more_squids) ==
        doctest::Approx(kerr_anharmonicity(kPaperDesign) / 4).epsilon(1e-12));

  CircuitDesign more_cap = kPaperDesign;
  more_cap.capacitance *= 2;
  CHECK(kerr_anharmonicity(more_cap) ==
        doctest::Approx(kerr_anharmonicity(kPaperDesign) / 2).epsilon(1e-12));
}

TEST_CASE("kerr anharmonicity is strictly negative for random designs") {
  const CounterRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const CircuitDesign d{std::exp(rng.uniform(3 * i, std::log(0.1e-9), std::log(1e-6))),
                          std::exp(rng.uniform(3 * i + 1, std::log(1e-15), std::log(1e-9))),
                          1 + static_cast<int>(rng.uniform(3 * i + 2, 0, 100))};
    CHECK(kerr_anharmonicity(d) < 0);
  }
}

TEST_CASE("impedance * frequency identity 1/C") {
  const CounterRng rng(12);
  for (int i = 0; i < 200; ++i) {
    const CircuitDesign d{std::exp(rng.uniform(3 * i, std::log(0.1e-9), std::log(1e-6))),
                          std::exp(rng.uniform(3 * i + 1, std::log(1e-15), std::log(1e-9))),
                          1 + static_cast<int>(rng.uniform(3 * i + 2, 0, 100))};
    const double lhs = impedance(d) * resonator_frequency(d);
    CHECK(std::abs(lhs - 1.0 / d.capacitance) <= 1e-12 / d.capacitance);
  }
}

TEST_CASE("flux tuning law") {
  const double wmax = kTwoPi * 8.31e9;
  CHECK(flux_tuned_frequency(wmax, 0.0) == doctest::Approx(wmax).epsilon(1e-14));
  CHECK(flux_tuned_frequency(wmax, 1.0 / 6) ==
        doctest::Approx(wmax * 0.7071067811865476).epsilon(1e-12));
  CHECK(flux_tuned_frequency(wmax, 0.25) <= wmax * 1e-7);

  SUBCASE("periodic with period 1/2 and even") {
    const CounterRng rng(13);
    for (int i = 0; i < 200; ++i) {
      const double phi = rng.uniform(i, -1.0, 1.0);
      const double f = flux_tuned_frequency(wmax, phi);
      CHECK(flux_tuned_frequency(wmax, phi + 0.5) == doctest::Approx(f).epsilon(1e-12));
      CHECK(flux_tuned_frequency(wmax, -phi) == doctest::Approx(f).epsilon(1e-12));
      CHECK(f >= 0);
      CHECK(f <= wmax * (1 + 1e-15));
    }
  }

  SUBCASE("monotonically decreasing on [0, 1/4]") {
    double prev = flux_tuned_frequency(wmax, 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double cur = flux_tuned_frequency(wmax, 0.25 * i / 100);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("bias voltage calibration curve") {
  const FluxCalibration cal{kTwoPi * 8.31e9, 2.4, 0.31};
  const double v0 = -cal.phi_offset / cal.gain;
  CHECK(voltage_to_frequency(cal, v0) == doctest::Approx(cal.omega_max).epsilon(1e-12));

  const double v_third = (std::numbers::pi / 3 - cal.phi_offset) / cal.gain;
  CHECK(voltage_to_frequency(cal, v_third) ==
        doctest::Approx(cal.omega_max * 0.7071067811865476).epsilon(1e-12));

  SUBCASE("periodic in V with period pi/G") {
    const double period = std::numbers::pi / cal.gain;
    for (int i = 0; i < 50; ++i) {
      const double v = -2.0 + 4.0 * i / 49;
      CHECK(voltage_to_frequency(cal, v + period) ==
            doctest::Approx(voltage_to_frequency(cal, v)).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero-point voltage") {
  const double v = zero_point_voltage(kTwoPi * 8.31e9, 33e-15);
  CHECK(v == doctest::Approx(9.1339e-6).epsilon(5e-4));

  // quadrupling Z at fixed omega (L x4, C /4) doubles V_zp
  const CircuitDesign base{11e-9, 33e-15, 17};
  const CircuitDesign zx4{4 * 11e-9, 33e-15 / 4, 17};
  CHECK(resonator_frequency(zx4) == doctest::Approx(resonator_frequency(base)).epsilon(1e-12));
  CHECK(impedance(zx4) == doctest::Approx(4 * impedance(base)).epsilon(1e-12));
  const double w = resonator_frequency(base);
  CHECK(zero_point_voltage(w, zx4.capacitance) ==
        doctest::Approx(2 * zero_point_voltage(w, base.capacitance)).epsilon(1e-12));

  // quadrupling C at fixed omega halves V_zp
  CHECK(zero_point_voltage(w, 4 * base.capacitance) ==
        doctest::Approx(zero_point_voltage(w, base.capacitance) / 2).epsilon(1e-12));
}

TEST_CASE("charging energy appears in the derive report units") {
  const double ec = charging_energy(kPaperDesign);
  const PhysicalConstants pc;
  CHECK(ec / pc.planck == doctest::Approx(0.58697e9).epsilon(1e-4));
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(resonator_frequency({-1e-9, 33e-15, 17}), InvalidInputError);
  CHECK_THROWS_AS(resonator_frequency({11e-9, 0, 17}), InvalidInputError);
  CHECK_THROWS_AS(resonator_frequency({11e-9, 33e-15, 0}), InvalidInputError);
  CHECK_THROWS_AS(flux_tuned_frequency(-1.0, 0.1), InvalidInputError);

  PhysicalConstants pc;
  pc.flux_quantum = 1e-15;  // inconsistent with h/2e
  CHECK_THROWS_AS(pc.validate(), InvalidInputError);
  CHECK_NOTHROW(PhysicalConstants{}.validate());
}
