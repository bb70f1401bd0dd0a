#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nvrabi/ensemble.hpp"
#include "nvrabi/spin_core.hpp"

namespace nvrabi {

enum class Protocol { OnOff, PiPulse };

struct SequenceParams {
  double mw_duration = 30e-6;     // tau, s
  double overhead = 44.8e-6;      // t_O, s
  Protocol protocol = Protocol::PiPulse;
  double sequence_rate = 13.23e3; // Hz
  double data_rate = 6.615e3;     // Hz, one sample per subtracted pair
  double pi_fidelity = 1.0;

  void validate() const;
};

struct TimeSeries {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s
  std::vector<double> samples;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Subtracted magnetometry signal for a single spin-population value, in
// contrast units. ON_OFF pairs the measurement with a drive-free reference
// (-P); PI_PULSE pairs it with a pi-prefixed inverted sequence
// (pi_fidelity * (2P - 1)). The peak-to-peak PI_PULSE output is exactly
// twice the ON_OFF output on any population grid.
double subtracted_signal(double population, Protocol protocol,
                         double pi_fidelity);

// Subtracted ensemble signal at fixed tau in normalized fluorescence units.
// The far-detuned hyperfine branch responds identically to both sequences of
// a pi-pulse pair and cancels in the difference; only the (1 - w) amplitude
// factor of the resonant branch survives. The on-off difference keeps the
// full hyperfine mixture.
double subtracted_ensemble_value(const std::vector<SpinSample>& samples,
                                 const HyperfineModel& hf, double tau,
                                 double contrast_ceiling, Protocol protocol,
                                 double pi_fidelity);

// One sample per subtracted pair at data_rate, evaluating the ensemble at the
// instantaneous drive strength (quasi-static: Omega is frozen within a pair).
// Noiseless; noise is applied downstream. omega_of_t returning a negative
// value is a domain error.
TimeSeries render_time_series(const std::function<double(double)>& omega_of_t,
                              const EnsembleParams& ens,
                              const SequenceParams& seq,
                              const HyperfineModel& hf, double duration,
                              std::uint64_t seed,
                              std::size_t n_samples = 20000);

// Residual modulation-index ratio (pi-pulse vs on-off): sideband power at the
// hyperfine beat frequency relative to the Rabi carrier, per trace. < 1 means
// the pi-pulse protocol suppresses the modulation.
double hyperfine_suppression_metric(const RabiTrace& trace_onoff,
                                    const RabiTrace& trace_pi,
                                    double beat_frequency);

// Protocol-subtracted ensemble trace over a tau grid (used by the trace
// subcommand and the suppression metric).
RabiTrace subtracted_rabi_trace(const EnsembleParams& params,
                                double omega_nominal,
                                const std::vector<double>& tau_grid,
                                const HyperfineModel& hf, Protocol protocol,
                                double pi_fidelity, std::size_t n_samples,
                                std::uint64_t seed);

}  // namespace nvrabi
