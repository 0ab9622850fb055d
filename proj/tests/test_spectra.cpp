#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <cstring>

#include "emspec/constants.hpp"
#include "emspec/errors.hpp"
#include "emspec/rng.hpp"
#include "emspec/spectra.hpp"
#include "test_support.hpp"

using namespace emspec;
using emspec::testing::paper_mode;
using emspec::testing::paper_model;
using emspec::testing::paper_resonator;
using emspec::testing::random_model;

TEST_CASE("resonator susceptibility") {
  const ResonatorParams r = paper_resonator();
  CHECK(std::abs(resonator_susceptibility(r.omega_r, r) - cdouble(1, 0)) < 1e-14);

  const cdouble half = resonator_susceptibility(r.omega_r + r.kappa / 2, r);
  CHECK(std::abs(half - cdouble(0.5, -0.5)) < 1e-11);  // 1/(1+i)

  CHECK(std::abs(resonator_susceptibility(r.omega_r + 1e6 * r.kappa, r)) < 1e-5);

  const CounterRng rng(21);
  for (int i = 0; i < 100; ++i) {
    const double w = r.omega_r + r.kappa * rng.uniform(i, -50.0, 50.0);
    CHECK(std::abs(resonator_susceptibility(w, r)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("mechanical susceptibility") {
  const MechanicalMode m = paper_mode();
  CHECK(std::abs(mechanical_susceptibility(m.omega_m, m) - cdouble(1, 0)) < 1e-14);
  const cdouble half = mechanical_susceptibility(m.omega_m - m.gamma / 2, m);
  CHECK(std::abs(half - cdouble(0.5, 0.5)) < 1e-11);  // 1/(1-i)
  CHECK(std::abs(mechanical_susceptibility(m.omega_m + 1e7 * m.gamma, m)) < 1e-6);
}

TEST_CASE("bare reflection") {
  const ResonatorParams r = paper_resonator();
  CHECK(s11_bare(r.omega_r, r).real() == doctest::Approx(0.1454545454545455).epsilon(1e-12));
  CHECK(std::abs(s11_bare(r.omega_r, r).imag()) < 1e-14);

  const ResonatorParams critical{r.omega_r, r.kappa, r.kappa / 2};
  CHECK(std::abs(s11_bare(critical.omega_r, critical)) < 1e-14);

  const ResonatorParams closed{r.omega_r, r.kappa, 0.0};
  for (const double d : {-3.0, -0.5, 0.0, 0.7, 2.0})
    CHECK(std::abs(s11_bare(r.omega_r + d * r.kappa, closed) - cdouble(-1, 0)) < 1e-14);

  SUBCASE("|s11| symmetric about resonance") {
    const CounterRng rng(22);
    for (int i = 0; i < 100; ++i) {
      const double d = r.kappa * rng.uniform(i, 0.0, 20.0);
      CHECK(std::abs(std::abs(s11_bare(r.omega_r + d, r)) -
                     std::abs(s11_bare(r.omega_r - d, r))) < 1e-12);
    }
  }
}

TEST_CASE("coupled reflection") {
  SystemModel model = paper_model();
  // place the mode on resonance: C = 4.5, eta = 6.3/11
  model.resonator.omega_r = model.modes[0].omega_m;
  const double w = model.resonator.omega_r;
  CHECK(cooperativity(model.modes[0], model.resonator) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(s11_coupled(w, model).real() == doctest::Approx(-0.7917355371900826).epsilon(1e-9));
  CHECK(std::abs(s11_coupled(w, model).imag()) < 1e-12);

  SUBCASE("decoupled limit reduces to the bare model") {
    SystemModel off = model;
    off.modes[0].g = 0;
    for (int i = 0; i <= 200; ++i) {
      const double ww = w + (i - 100) * model.resonator.kappa / 20;
      CHECK(std::abs(s11_coupled(ww, off) - s11_bare(ww, off.resonator)) < 1e-15);
    }
  }

  SUBCASE("far-detuned mode is invisible at the resonator") {
    SystemModel far = model;
    far.modes[0].omega_m = far.resonator.omega_r + 100 * far.resonator.kappa;
    double worst = 0;
    for (int i = 0; i <= 400; ++i) {
      const double ww = far.resonator.omega_r + (i - 200) * far.resonator.kappa / 200;
      worst = std::max(worst, std::abs(s11_coupled(ww, far) - s11_bare(ww, far.resonator)));
    }
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("cooperativity and quality factor") {
  const ResonatorParams r = paper_resonator();
  MechanicalMode m = paper_mode();
  CHECK(cooperativity(m, r) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(quality_factor(m) == doctest::Approx(27160.909090909).epsilon(1e-9));

  MechanicalMode off = m;
  off.g = 0;
  CHECK(cooperativity(off, r) == 0);
  off.g = 2 * m.g;
  CHECK(cooperativity(off, r) == doctest::Approx(4 * cooperativity(m, r)).epsilon(1e-12));

  MechanicalMode damped = m;
  damped.gamma = m.omega_m;
  CHECK(quality_factor(damped) == doctest::Approx(1.0));
  damped.gamma = m.gamma / 2;
  CHECK(quality_factor(damped) == doctest::Approx(2 * quality_factor(m)).epsilon(1e-12));
}

TEST_CASE("spectrum evaluation") {
  const SystemModel bare = paper_model(false);

  SUBCASE("single point agrees with the scalar op") {
    const Spectrum s = evaluate_spectrum(bare, {bare.resonator.omega_r / kTwoPi});
    REQUIRE(s.size() == 1);
    CHECK(s.s11[0].real() == doctest::Approx(0.1454545454545455).epsilon(1e-12));
  }

  SUBCASE("length preserved") {
    std::vector<double> grid;
    for (int i = 0; i < 137; ++i) grid.push_back(5.8e9 + i * 1e6);
    CHECK(evaluate_spectrum(bare, grid).size() == 137);
  }

  SUBCASE("bad grids are rejected") {
    CHECK_THROWS_AS(evaluate_spectrum(bare, {}), InvalidInputError);
    CHECK_THROWS_AS(evaluate_spectrum(bare, {5.9e9, 5.8e9}), InvalidInputError);
    CHECK_THROWS_AS(evaluate_spectrum(bare, {5.8e9, 5.8e9}), InvalidInputError);
  }

  SUBCASE("parallel kernel is bit-identical to the serial reference") {
    const CounterRng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      const SystemModel model = random_model(rng, static_cast<std::uint64_t>(trial));
      std::vector<double> grid;
      const double f0 = model.resonator.omega_r / kTwoPi - 40e6;
      for (int i = 0; i < 1001; ++i) grid.push_back(f0 + i * 80e3);
      const Spectrum par = evaluate_spectrum(model, grid);
      const Spectrum ser = evaluate_spectrum_serial(model, grid);
      REQUIRE(par.size() == ser.size());
      CHECK(std::memcmp(par.s11.data(), ser.s11.data(), par.size() * sizeof(cdouble)) == 0);
    }
  }
}

TEST_CASE("passivity of the coupled model") {
  const CounterRng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const SystemModel model = random_model(rng, static_cast<std::uint64_t>(trial));
    const CounterRng freq_rng(1000 + static_cast<std::uint64_t>(trial));
    for (int i = 0; i < 16; ++i) {
      const double w =
          model.resonator.omega_r + model.resonator.kappa * freq_rng.uniform(i, -30.0, 30.0);
      CHECK(std::abs(s11_coupled(w, model)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("asymptotic full reflection far from resonance") {
  const CounterRng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemModel model = random_model(rng, static_cast<std::uint64_t>(trial));
    const double far = 1e4 * model.resonator.kappa;
    CHECK(std::abs(s11_coupled(model.resonator.omega_r + far, model) + 1.0) < 1e-3);
    CHECK(std::abs(s11_coupled(model.resonator.omega_r - far, model) + 1.0) < 1e-3);
  }
}

TEST_CASE("denominator roots match the coupled-mode eigenvalues") {
  // Roots of 1 + C chi_m chi_r against the eigenvalues of
  // [[omega_r - i kappa/2, g], [g, omega_m - i gamma/2]]; with the
  // frequency-domain susceptibility convention the roots are the complex
  // conjugates of those eigenvalues.
  const CounterRng rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t c = static_cast<std::uint64_t>(trial) * 8;
    ResonatorParams r = paper_resonator();
    r.omega_r = kTwoPi * rng.uniform(c, 5e9, 7e9);
    r.kappa = kTwoPi * rng.uniform(c + 1, 1e6, 20e6);
    r.kappa_e = r.kappa * rng.uniform(c + 2, 0.1, 0.9);
    const MechanicalMode m{r.omega_r + r.kappa * rng.uniform(c + 3, -3.0, 3.0),
                           kTwoPi * rng.uniform(c + 4, 0.05e6, 1e6),
                           kTwoPi * rng.uniform(c + 5, 0.0, 4e6)};

    const auto roots = coupled_mode_poles(r, m);

    Eigen::Matrix2cd coupling_matrix;
    coupling_matrix << cdouble(r.omega_r, -r.kappa / 2), cdouble(m.g, 0), cdouble(m.g, 0),
        cdouble(m.omega_m, -m.gamma / 2);
    const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(coupling_matrix);
    cdouble ev0 = std::conj(es.eigenvalues()(0));
    cdouble ev1 = std::conj(es.eigenvalues()(1));
    if (std::abs(roots[0] - ev0) + std::abs(roots[1] - ev1) >
        std::abs(roots[0] - ev1) + std::abs(roots[1] - ev0))
      std::swap(ev0, ev1);
    CHECK(std::abs(roots[0] - ev0) <= 1e-9 * std::abs(ev0));
    CHECK(std::abs(roots[1] - ev1) <= 1e-9 * std::abs(ev1));
  }
}

TEST_CASE("decoupled limit is linear in the cooperativity") {
  SystemModel model = paper_model();
  model.resonator.omega_r = model.modes[0].omega_m;
  const auto max_diff = [&](double g) {
    SystemModel m = model;
    m.modes[0].g = g;
    double worst = 0;
    for (int i = 0; i <= 2000; ++i) {
      const double w = m.resonator.omega_r + (i - 1000) * m.resonator.kappa / 250;
      worst = std::max(worst, std::abs(s11_coupled(w, m) - s11_bare(w, m.resonator)));
    }
    return worst;
  };
  // C ~ g^2: halving C means g / sqrt(2)
  const double d1 = max_diff(kTwoPi * 50e3);
  const double d2 = max_diff(kTwoPi * 50e3 / std::sqrt(2.0));
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.05));
}
