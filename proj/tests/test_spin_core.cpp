#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nvrabi/rng.hpp"
#include "nvrabi/spin_core.hpp"
#include "nvrabi/units.hpp"

using namespace nvrabi;

TEST_CASE("rabi_population closed form") {
  DriveParams d;
  d.rabi_frequency = kTwoPi * 220e3;
  d.detuning = 0.0;
  CHECK(rabi_population(d, 1.0 / (2.0 * 220e3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rabi_population(d, 0.0) == 0.0);

  DriveParams zero;
  CHECK(rabi_population(zero, 1e-3) == 0.0);

  DriveParams eq;
  eq.rabi_frequency = kTwoPi * 50e3;
  eq.detuning = eq.rabi_frequency;
  const double weff = std::sqrt(2.0) * eq.rabi_frequency;
  CHECK(rabi_population(eq, kTwoPi / 2.0 / weff) ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(rabi_population(d, -1e-9), std::domain_error);
  eq.rabi_frequency = -1.0;
  CHECK_THROWS_AS(rabi_population(eq, 1e-6), std::domain_error);
}

TEST_CASE("rabi_population bounds, period, max") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    DriveParams d;
    d.rabi_frequency = kTwoPi * 1e6 * rng.uniform();
    d.detuning = kTwoPi * 1e6 * (rng.uniform() - 0.5);
    const double tau = 50e-6 * rng.uniform();
    const double p = rabi_population(d, tau);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);

    const double weff = std::hypot(d.rabi_frequency, d.detuning);
    if (weff > 0.0) {
      const double period = kTwoPi / weff;
      CHECK(rabi_population(d, tau + period) == doctest::Approx(p).epsilon(1e-9));
      // maximum over tau at half a generalized period
      const double pmax = rabi_population(d, period / 2.0);
      const double analytic = d.rabi_frequency * d.rabi_frequency / (weff * weff);
      CHECK(pmax == doctest::Approx(analytic).epsilon(1e-12));
    }
  }
}

TEST_CASE("bloch_integrate pi pulse and edge cases") {
  DriveParams d;
  d.rabi_frequency = kTwoPi * 100e3;
  const double tau_pi = kTwoPi / 2.0 / d.rabi_frequency;
  CHECK(bloch_integrate(d, tau_pi, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bloch_integrate(d, 0.0, 1e-9) == 0.0);
  CHECK_THROWS(bloch_integrate(d, 10e-6, 5e-6));  // step > tau/100
}

TEST_CASE("bloch_integrate matches the closed form on randomized drives") {
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    DriveParams d;
    d.rabi_frequency = kTwoPi * 1e6 * rng.uniform();
    d.detuning = kTwoPi * 1e6 * (rng.uniform() - 0.5);
    const double tau = 1e-6 + 9e-6 * rng.uniform();
    const double err =
        std::fabs(bloch_integrate(d, tau, 1e-9) - rabi_population(d, tau));
    worst = std::max(worst, err);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("hyperfine_population mixture model") {
  DriveParams d;
  d.rabi_frequency = kTwoPi * 220e3;
  HyperfineModel off;  // depth 0
  off.beat_frequency = 40e3;
  off.hf_detuning = kTwoPi * 3e6;
  for (double tau : {1e-6, 7e-6, 33e-6})
    CHECK(hyperfine_population(d, off, tau) == rabi_population(d, tau));

  HyperfineModel hf;
  hf.beat_frequency = 40e3;
  hf.modulation_depth = 1.0;
  hf.hf_detuning = kTwoPi * 3e6;
  const double node = 2.0 / hf.beat_frequency;  // f_mod * tau integer -> w = 0
  CHECK(hyperfine_population(d, hf, node) ==
        doctest::Approx(rabi_population(d, node)).epsilon(1e-9));

  hf.modulation_depth = 0.3;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double tau = 100e-6 * rng.uniform();
    const double w = hyperfine_weight(hf, tau);
    DriveParams shifted = d;
    shifted.detuning += hf.hf_detuning;
    const double direct = (1.0 - w) * rabi_population(d, tau) +
                          w * rabi_population(shifted, tau);
    const double p = hyperfine_population(d, hf, tau);
    CHECK(p == doctest::Approx(direct).epsilon(1e-12));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("effective_rabi composition") {
  const double gamma = kGammaE;
  FieldVector f;
  f.drive_amplitude = 1e-4;
  CHECK(effective_rabi(f, gamma) ==
        doctest::Approx(gamma * 1e-4 / kSqrt3).epsilon(1e-12));

  f.signal_amplitude = f.drive_amplitude;
  f.relative_phase = 0.0;
  CHECK(effective_rabi(f, gamma) ==
        doctest::Approx(2.0 * gamma * 1e-4 / kSqrt3).epsilon(1e-12));
  f.relative_phase = kTwoPi / 2.0;
  CHECK(effective_rabi(f, gamma) == doctest::Approx(0.0));

  // Omega = 2 pi 42.8 kHz drive plus 4.4 nT in phase
  const double omega = kTwoPi * 42.8e3;
  FieldVector g;
  g.drive_amplitude = omega * kSqrt3 / gamma;
  g.signal_amplitude = 4.4e-9;
  CHECK(effective_rabi(g, gamma) ==
        doctest::Approx(omega + gamma * 4.4e-9 / kSqrt3).epsilon(1e-12));

  // monotone in the signal amplitude at phase 0, antitone at pi
  double prev0 = 0.0, prevpi = 1e18;
  for (double db = 0.0; db <= 1e-4; db += 1e-5) {
    FieldVector h;
    h.drive_amplitude = 1e-4;
    h.signal_amplitude = db;
    h.relative_phase = 0.0;
    const double up = effective_rabi(h, gamma);
    CHECK(up >= prev0);
    prev0 = up;
    h.relative_phase = kTwoPi / 2.0;
    const double down = effective_rabi(h, gamma);
    CHECK(down <= prevpi);
    prevpi = down;
  }
}
