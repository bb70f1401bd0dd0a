#pragma once

#include <cstdint>
#include <vector>

#include "nvrabi/ensemble.hpp"
#include "nvrabi/sequence.hpp"

namespace nvrabi {

// Sensitivity figure of merit F = C exp(-(tau/T2rho)^p) tau/sqrt(tau + t_O).
// Maximizing F minimizes the shot-noise-limited sensitivity.
double fom(double contrast, double t2_rho, double stretch, double tau,
           double overhead);

struct TauSearchResult {
  double tau_opt = 0.0;   // s
  double fom_max = 0.0;   // s^1/2 scaled by the dimensionless contrast terms
  bool at_boundary = false;
};

// Grid search (default 1 us over [1 us, 200 us]) plus golden-section
// refinement. For p = 1 the interior optimum satisfies
// 1/tau - 1/T2rho - 1/(2(tau + t_O)) = 0.
TauSearchResult optimal_tau(double contrast, double t2_rho, double stretch,
                            double overhead, double tau_lo = 1e-6,
                            double tau_hi = 200e-6, double grid_step = 1e-6);

struct FomPoint {
  double omega = 0.0;     // rad/s
  double tau_opt = 0.0;   // s
  double fom_value = 0.0;
  bool at_boundary = false;
};

struct FomSweep {
  std::vector<FomPoint> points;  // ordered by omega
  std::size_t argmax = 0;
};

// Per-row optimal tau over a characterization table; ties break toward the
// lower drive strength.
FomSweep fom_sweep(const std::vector<OmegaCharacterization>& table,
                   double overhead, double tau_lo = 1e-6,
                   double tau_hi = 200e-6);

struct SlopeScan {
  double omega_opt = 0.0;        // rad/s
  double slope = 0.0;            // |dS/dOmega|, signal per rad/s
  std::vector<double> omega;     // rad/s
  std::vector<double> signal;    // subtracted signal at fixed tau
};

// Fixed-tau sweep of the subtracted ensemble signal over omega_grid; returns
// the steepest point by centered finite differences. The grid step must
// resolve the fringe (step < (2 pi / tau) / 10).
SlopeScan slope_scan(const EnsembleParams& ens, const SequenceParams& seq,
                     const HyperfineModel& hf,
                     const std::vector<double>& omega_grid,
                     std::size_t n_samples, std::uint64_t seed);

}  // namespace nvrabi
