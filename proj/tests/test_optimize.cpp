#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nvrabi/optimize.hpp"
#include "nvrabi/rng.hpp"
#include "nvrabi/units.hpp"

using namespace nvrabi;

TEST_CASE("fom direct evaluation") {
  // C = 0.01, T2rho = 50 us, p = 1, tau = 30 us, t_O = 44.8 us
  const double f = fom(0.01, 50e-6, 1.0, 30e-6, 44.8e-6);
  // 1.904e-2 in sqrt(us) units; 1 sqrt(us) = 1e-3 sqrt(s)
  CHECK(f * 1e3 == doctest::Approx(1.904e-2).epsilon(2e-4));
  CHECK(fom(0.0, 50e-6, 1.0, 30e-6, 44.8e-6) == 0.0);
  CHECK(fom(0.01, 50e-6, 1.0, 1e-12, 44.8e-6) < 1e-9);
  CHECK_THROWS_AS(fom(0.01, -1.0, 1.0, 30e-6, 44.8e-6), std::invalid_argument);
}

TEST_CASE("fom scaling invariance in (tau, T2rho, t_O)") {
  const double base = fom(0.02, 50e-6, 1.3, 25e-6, 44.8e-6);
  for (double lam : {2.0, 5.0, 0.3}) {
    const double scaled = fom(0.02, lam * 50e-6, 1.3, lam * 25e-6, lam * 44.8e-6);
    CHECK(scaled == doctest::Approx(base * std::sqrt(lam)).epsilon(1e-12));
  }
}

TEST_CASE("optimal_tau satisfies the p=1 stationarity condition") {
  for (double t2 : {30e-6, 50e-6, 90e-6}) {
    const TauSearchResult r = optimal_tau(0.02, t2, 1.0, 44.8e-6);
    REQUIRE(!r.at_boundary);
    const double tau = r.tau_opt;
    const double resid =
        1.0 / tau - 1.0 / t2 - 0.5 / (tau + 44.8e-6);
    CHECK(std::fabs(resid) * tau < 1e-6);  // relative to 1/tau
  }
}

TEST_CASE("no-decay limit pushes tau to the boundary") {
  const TauSearchResult r = optimal_tau(0.02, 1e3, 1.0, 44.8e-6);
  CHECK(r.at_boundary);
  CHECK(r.tau_opt == doctest::Approx(200e-6));
}

TEST_CASE("optimal tau is monotone in T2rho") {
  double prev = 0.0;
  for (double t2 : {20e-6, 40e-6, 80e-6, 160e-6}) {
    const TauSearchResult r = optimal_tau(0.02, t2, 1.2, 44.8e-6);
    CHECK(r.tau_opt >= prev);
    prev = r.tau_opt;
  }
}

TEST_CASE("fom_sweep matches dense brute force on random tables") {
  Rng rng(13);
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<OmegaCharacterization> table;
    for (int i = 0; i < 8; ++i) {
      OmegaCharacterization row;
      row.omega = kTwoPi * (10e3 + 25e3 * i);
      row.contrast = 0.005 + 0.035 * rng.uniform();
      row.t2_rho = (15.0 + 120.0 * rng.uniform()) * 1e-6;
      row.stretch = 0.8 + 1.2 * rng.uniform();
      row.converged = true;
      table.push_back(row);
    }
    const FomSweep sweep = fom_sweep(table, 44.8e-6);

    // dense brute force over (row, tau)
    std::size_t best_row = 0;
    double best_f = -1.0;
    for (std::size_t r = 0; r < table.size(); ++r) {
      for (double tau = 1e-6; tau <= 200e-6; tau += 0.05e-6) {
        const double f = fom(table[r].contrast, table[r].t2_rho,
                             table[r].stretch, tau, 44.8e-6);
        if (f > best_f) {
          best_f = f;
          best_row = r;
        }
      }
    }
    CHECK(sweep.argmax == best_row);
    CHECK(sweep.points[sweep.argmax].fom_value ==
          doctest::Approx(best_f).epsilon(1e-6));
  }
}

TEST_CASE("flat table ties break toward the lowest omega") {
  std::vector<OmegaCharacterization> table;
  for (int i = 0; i < 5; ++i) {
    OmegaCharacterization row;
    row.omega = kTwoPi * (20e3 + 10e3 * i);
    row.contrast = 0.02;
    row.t2_rho = 60e-6;
    row.stretch = 1.0;
    row.converged = true;
    table.push_back(row);
  }
  CHECK(fom_sweep(table, 44.8e-6).argmax == 0);

  // single row is trivially the argmax
  CHECK(fom_sweep({table[2]}, 44.8e-6).argmax == 0);
}

TEST_CASE("slope_scan guards, symmetry, self-consistency") {
  EnsembleParams ens;
  ens.mw_inhomogeneity = 0.0;
  ens.t2_star = 1e9;  // noiseless single-spin limit
  SequenceParams seq;
  seq.mw_duration = 30e-6;
  HyperfineModel hf;

  CHECK_THROWS_AS(slope_scan(ens, seq, hf,
                             {kTwoPi * 10e3, kTwoPi * 60e3, kTwoPi * 110e3},
                             10, 1),
                  std::invalid_argument);

  const double center = kTwoPi * 42.8e3;
  const double fringe = kTwoPi / seq.mw_duration;
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(center + i * fringe / 40.0);
  const SlopeScan scan = slope_scan(ens, seq, hf, grid, 10, 1);

  // reported slope equals the centered secant at omega_opt
  std::size_t k = 0;
  for (std::size_t i = 0; i < scan.omega.size(); ++i)
    if (scan.omega[i] == scan.omega_opt) k = i;
  const double secant = std::fabs((scan.signal[k + 1] - scan.signal[k - 1]) /
                                  (scan.omega[k + 1] - scan.omega[k - 1]));
  CHECK(scan.slope == doctest::Approx(secant).epsilon(1e-12));
  CHECK(scan.slope > 0.0);

  // mirror symmetry about a fringe extremum of the noiseless closed form:
  // S(omega) depends on omega tau only; extremum where sin(omega tau) = 0
  const double w_ext = std::round(center * seq.mw_duration / (kTwoPi / 2.0)) *
                       (kTwoPi / 2.0) / seq.mw_duration;
  std::vector<double> sym;
  const double dw = fringe / 80.0;
  for (int i = -8; i <= 8; ++i) sym.push_back(w_ext + i * dw);
  const SlopeScan s2 = slope_scan(ens, seq, hf, sym, 10, 1);
  for (int i = 1; i <= 8; ++i) {
    const double left = s2.signal[8 - i] - s2.signal[8];
    const double right = s2.signal[8 + i] - s2.signal[8];
    CHECK(left == doctest::Approx(right).epsilon(1e-9));
  }
}
