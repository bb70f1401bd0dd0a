#include "nvrabi/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

#include "nvrabi/units.hpp"

namespace nvrabi {

Spectrum asd(const TimeSeries& series) {
  const std::size_t n = series.samples.size();
  if (n < 2) throw std::invalid_argument("asd: need at least 2 samples");
  if (series.sample_rate <= 0.0)
    throw std::invalid_argument("asd: sample_rate must be > 0");

  const std::size_t nbins = n / 2 + 1;
  std::vector<double> in(series.samples.begin(), series.samples.end());
  std::vector<fftw_complex> out(nbins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                        out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum spec;
  spec.source_duration = static_cast<double>(n) / series.sample_rate;
  spec.source_sample_rate = series.sample_rate;
  spec.bin_width = 1.0 / spec.source_duration;
  spec.frequency.resize(nbins);
  spec.amplitude.resize(nbins);
  const bool has_nyquist = n % 2 == 0;
  for (std::size_t k = 0; k < nbins; ++k) {
    spec.frequency[k] = spec.bin_width * static_cast<double>(k);
    const double mag =
        std::hypot(out[k][0], out[k][1]) / static_cast<double>(n);
    // DC (and the exact-Nyquist bin for even n) carry their full power in a
    // single real coefficient; interior bins split between +/- frequencies.
    if (k == 0 || (has_nyquist && k == nbins - 1))
      spec.amplitude[k] = mag / std::sqrt(spec.bin_width);
    else
      spec.amplitude[k] = 2.0 * mag / std::sqrt(2.0 * spec.bin_width);
  }
  return spec;
}

BandRms highpass_rms(const Spectrum& spec, double cutoff) {
  const double nyquist = 0.5 * spec.source_sample_rate;
  if (cutoff >= nyquist)
    throw std::invalid_argument("highpass_rms: cutoff at or above Nyquist leaves an empty band");
  const double fmax_counted = nyquist - spec.bin_width;
  BandRms out;
  double power = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 1; k < spec.frequency.size(); ++k) {
    const double f = spec.frequency[k];
    if (f < cutoff) continue;
    power += spec.amplitude[k] * spec.amplitude[k];
    if (f <= fmax_counted + 1e-9 * spec.bin_width) ++counted;
  }
  out.enbw = static_cast<double>(counted) * spec.bin_width;
  out.sigma_s = std::sqrt(power * spec.bin_width);
  return out;
}

Spectrum apply_highpass(Spectrum spec, double cutoff) {
  for (std::size_t k = 0; k < spec.frequency.size(); ++k)
    if (spec.frequency[k] < cutoff) spec.amplitude[k] = 0.0;
  return spec;
}

SensitivityReport calibrate_sensitivity(double sigma_s, double slope,
                                        double enbw, double gamma) {
  if (slope <= 0.0)
    throw std::invalid_argument("calibrate_sensitivity: slope must be > 0 (operating point not set)");
  if (gamma <= 0.0)
    throw std::invalid_argument("calibrate_sensitivity: gamma must be > 0");
  if (enbw <= 0.0)
    throw std::invalid_argument("calibrate_sensitivity: enbw must be > 0");
  SensitivityReport r;
  r.sigma_s = sigma_s;
  r.slope = slope;
  r.enbw = enbw;
  r.sigma_b = kSqrt3 * sigma_s / (gamma * slope);
  r.eta = r.sigma_b / std::sqrt(2.0 * enbw);
  return r;
}

double shot_noise_limit(const EnsembleParams& ens, const SequenceParams& seq,
                        const ContrastInputs& in) {
  if (in.contrast <= 0.0 || in.t2_rho <= 0.0 || in.stretch <= 0.0 ||
      in.tau <= 0.0)
    throw std::invalid_argument("shot_noise_limit: all contrast inputs must be > 0");
  const double envelope =
      std::exp(-std::pow(in.tau / in.t2_rho, in.stretch));
  return (kSqrt2 / ens.gamma) * (1.0 / ens.projection) *
         (1.0 / std::sqrt(ens.photons_per_measurement())) *
         (1.0 / (in.contrast * envelope)) *
         std::sqrt(in.tau + seq.overhead) / in.tau;
}

}  // namespace nvrabi
