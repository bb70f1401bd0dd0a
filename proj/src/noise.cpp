#include "nvrabi/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

#include "nvrabi/rng.hpp"

namespace nvrabi {

void NoiseConfig::validate() const {
  if (laser_white_asd < 0.0)
    throw std::invalid_argument("noise.laser_white_asd must be >= 0");
  if (laser_flicker_corner < 0.0)
    throw std::invalid_argument("noise.laser_flicker_corner must be >= 0");
  if (cancellation_residual < 0.0 || cancellation_residual > 1.0)
    throw std::invalid_argument("noise.cancellation_residual must be in [0, 1]");
}

TimeSeries apply_shot_noise(const TimeSeries& series, const EnsembleParams& ens,
                            const SequenceParams& seq, std::uint64_t seed) {
  (void)seq;
  const double mean_photons = ens.photons_per_measurement();
  if (mean_photons < 1.0)
    throw std::invalid_argument("apply_shot_noise: N*n_avg must be >= 1");
  TimeSeries out = series;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    Rng rng(seed, rng_tag::kShotNoise, k);
    double c1, c2;
    if (mean_photons > 1000.0) {
      c1 = mean_photons + std::sqrt(mean_photons) * rng.gaussian();
      c2 = mean_photons + std::sqrt(mean_photons) * rng.gaussian();
    } else {
      c1 = static_cast<double>(rng.poisson(mean_photons));
      c2 = static_cast<double>(rng.poisson(mean_photons));
    }
    out.samples[k] += (c1 - c2) / mean_photons;
  }
  return out;
}

TimeSeries apply_laser_noise(const TimeSeries& series, const NoiseConfig& cfg) {
  cfg.validate();
  const double scale = cfg.cancellation_residual * cfg.laser_white_asd;
  if (scale == 0.0) return series;

  const std::size_t n = series.samples.size();
  if (n < 2) throw std::invalid_argument("apply_laser_noise: series too short");
  const std::size_t nbins = n / 2 + 1;
  const double bin_width = series.sample_rate / static_cast<double>(n);
  const bool has_nyquist = n % 2 == 0;

  // Hermitian spectrum with E|X_k|^2 matching the target single-sided ASD.
  std::vector<fftw_complex> freq(nbins);
  freq[0][0] = freq[0][1] = 0.0;
  for (std::size_t k = 1; k < nbins; ++k) {
    Rng rng(cfg.seed, rng_tag::kLaserNoise, k);
    const double f = bin_width * static_cast<double>(k);
    const double asd_k = scale * std::sqrt(1.0 + cfg.laser_flicker_corner / f);
    // interior bins: E|X|^2 = asd^2 * fs * n / 2; the c2r transform is
    // unnormalized, so divide by n afterwards.
    if (has_nyquist && k == nbins - 1) {
      freq[k][0] = asd_k *
                   std::sqrt(series.sample_rate * static_cast<double>(n)) *
                   rng.gaussian();
      freq[k][1] = 0.0;
    } else {
      const double sigma =
          asd_k * std::sqrt(series.sample_rate * static_cast<double>(n)) * 0.5;
      freq[k][0] = sigma * rng.gaussian();
      freq[k][1] = sigma * rng.gaussian();
    }
  }

  std::vector<double> noise(n);
  fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq.data(),
                                        noise.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  TimeSeries out = series;
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] += noise[i] / static_cast<double>(n);
  return out;
}

}  // namespace nvrabi
