#pragma once

#include <cstdint>

#include "nvrabi/ensemble.hpp"
#include "nvrabi/sequence.hpp"

namespace nvrabi {

struct NoiseConfig {
  bool shot_noise_enabled = true;
  double laser_white_asd = 0.0;       // relative intensity / sqrt(Hz)
  double laser_flicker_corner = 0.0;  // Hz
  double cancellation_residual = 0.0; // fraction of laser noise surviving
  std::uint64_t seed = 0;

  void validate() const;
};

// Photon statistics of both readouts of each subtracted pair: exact Poisson
// for N*n_avg <= 1000, Gaussian above. Zero-signal standard deviation per
// subtracted sample is sqrt(2)/sqrt(N*n_avg) in normalized-signal units.
TimeSeries apply_shot_noise(const TimeSeries& series, const EnsembleParams& ens,
                            const SequenceParams& seq, std::uint64_t seed);

// Residual laser intensity noise after common-mode cancellation: adds
// cancellation_residual times a realization with single-sided ASD
// laser_white_asd * sqrt(1 + flicker_corner/f), synthesized by
// frequency-domain shaping of white Gaussian noise.
TimeSeries apply_laser_noise(const TimeSeries& series, const NoiseConfig& cfg);

}  // namespace nvrabi
