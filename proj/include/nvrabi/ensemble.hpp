#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvrabi/fit.hpp"
#include "nvrabi/spin_core.hpp"
#include "nvrabi/units.hpp"

namespace nvrabi {

struct EnsembleParams {
  double gamma = kGammaE;            // rad s^-1 T^-1
  double t2_star = 9e-6;             // s
  double mw_inhomogeneity = 0.05;    // fractional Gaussian spread of the drive
  double nv_count = 4e12;            // NVs addressed
  double photons_per_nv = 0.01;      // photons per NV per measurement
  double contrast_ceiling = 0.04;    // full single-measurement contrast
  double stretch = 1.0;              // default p for analytic sensitivity inputs
  double projection = 1.0 / kSqrt3;  // F_perp for <100>-directed MW field
  double bias_field = 2.23 * kGauss; // tesla

  double linewidth() const { return 2.0 / t2_star; }  // Gamma = 2/T2*
  double photons_per_measurement() const { return nv_count * photons_per_nv; }
  void validate() const;  // throws std::invalid_argument naming the field
};

struct SpinSample {
  double detuning;        // rad/s
  double rabi_frequency;  // rad/s
};

struct RabiTrace {
  std::vector<double> tau_grid;  // s, strictly increasing
  std::vector<double> signal;    // normalized fluorescence (or subtracted signal)
  double drive_omega = 0.0;      // rad/s
  std::string protocol_tag;      // "raw", "on-off", "pi-pulse"
};

struct FitResult {
  double contrast = 0.0;    // C = 2A, contrast units
  double t2_rho = 0.0;      // s
  double stretch = 1.0;
  double omega_fit = 0.0;   // rad/s
  double phase = 0.0;       // rad
  double offset = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  bool degenerate = false;
};

// Lorentzian detunings with HWHM 1/T2* (so free-evolution dephasing averages
// to exp(-t/T2*)) and Gaussian fractional spread of the drive strength.
// Sample i depends only on (seed, i); order- and parallelism-independent.
std::vector<SpinSample> sample_ensemble(const EnsembleParams& params,
                                        double omega_nominal,
                                        std::size_t n_samples,
                                        std::uint64_t seed);

// Raw normalized-fluorescence ensemble trace S(tau) = 1 - C_max <P(tau)>.
// Decay emerges from averaging over the sampled inhomogeneities.
RabiTrace ensemble_rabi_trace(const EnsembleParams& params,
                              double omega_nominal,
                              const std::vector<double>& tau_grid,
                              const HyperfineModel& hf, std::size_t n_samples,
                              std::uint64_t seed);

// <P> over a pre-drawn sample set at one tau (resonant hyperfine branch
// weighting applied). Exposed for the sequence module.
double ensemble_population(const std::vector<SpinSample>& samples,
                           const HyperfineModel& hf, double tau);

// Fit S(tau) = B - A exp(-(tau/T2rho)^p) cos(w tau + phi); C reported as 2A.
FitResult fit_rabi_decay(const RabiTrace& trace, bool pin_stretch = false,
                         double pinned_stretch = 1.0);

struct OmegaCharacterization {
  double omega = 0.0;      // rad/s
  double contrast = 0.0;   // single-measurement contrast units
  double t2_rho = 0.0;     // s
  double stretch = 1.0;
  double residual_rms = 0.0;
  bool converged = false;
};

// Per-Omega pi-pulse-subtracted trace plus decay fit. The tau window is
// extended to at least 3.5 Rabi periods so the fit precondition holds at low
// drive strengths. The subtracted-trace amplitude equals the underlying
// measurement contrast, so the table reports C = A / pi_fidelity.
std::vector<OmegaCharacterization> characterize_vs_omega(
    const EnsembleParams& params, const std::vector<double>& omega_list,
    double tau_max, double tau_step, const HyperfineModel& hf,
    double pi_fidelity, std::size_t n_samples, std::uint64_t seed);

}  // namespace nvrabi
