#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nvrabi/sequence.hpp"
#include "nvrabi/spin_core.hpp"

namespace nvrabi {

enum class ModulationKind { AmSine, PmSquare, Bpsk };

struct ModulationSpec {
  ModulationKind kind = ModulationKind::AmSine;
  double signal_amplitude = 0.0;  // delta-B, tesla, >= 0
  double mod_frequency = 0.0;     // Hz (AM sine / PM square)
  double depth = 1.0;             // AM modulation index in [0, 1]
  double phase_deviation = 0.0;   // rad, |.| <= pi (PM / BPSK)
  std::vector<int> bitstream;     // BPSK payload
  double bit_rate = 0.0;          // Hz (BPSK)

  void validate() const;
};

// Instantaneous effective Rabi frequency Omega(t) for the modulated signal
// field riding on the drive. AM: signal amplitude delta-B (1 + m sin(2 pi
// f_m t))/2 at zero relative phase. PM: fixed delta-B with the relative
// phase square-wave toggling between 0 and phase_deviation at f_m. BPSK:
// per-bit phase 0 (bit 0) or phase_deviation (bit 1) at bit_rate; the
// +/-dev mapping is degenerate through the co-axial composition, so the
// bit levels use {0, dev}. Output stays within
// gamma (B_MW +/- delta-B)/sqrt(3). Warns on stderr when delta-B exceeds
// 10% of B_MW (small-signal regime guard); throws when it exceeds B_MW.
std::function<double(double)> synthesize_omega(const ModulationSpec& spec,
                                               double drive_field,
                                               double gamma);

// Single-bin discrete correlation at exactly f_m (mean removed), converted
// to tesla through the fringe slope (signal per rad/s) and the sqrt(3)/gamma
// field-to-Rabi calibration. An AM injection of amplitude delta-B at index m
// maps back to delta-B * m / 2.
double demod_am(const TimeSeries& series, double mod_frequency, double slope,
                double gamma);

struct BpskCalibration {
  double level_zero = 0.0;  // expected series value for bit 0
  double level_one = 0.0;   // expected series value for bit 1
  bool clock_synchronized = true;
};

struct BpskResult {
  std::vector<int> bits;
  std::size_t errors = 0;  // vs truth, when provided
  double ber = -1.0;       // -1 when no truth supplied
};

// Per-bit integrate-and-dump against the known bit clock with a threshold at
// the calibrated midpoint. No timing recovery: an unsynchronized clock is an
// explicit unsupported mode. bit_rate must not exceed sample_rate/10.
BpskResult demod_bpsk(const TimeSeries& series, double bit_rate,
                      const BpskCalibration& cal,
                      const std::vector<int>* truth = nullptr);

// Deterministic random payload for the demod subcommand and tests.
std::vector<int> random_bitstream(std::size_t n_bits, std::uint64_t seed);

}  // namespace nvrabi
