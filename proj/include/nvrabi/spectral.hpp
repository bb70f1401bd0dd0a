#pragma once

#include <vector>

#include "nvrabi/ensemble.hpp"
#include "nvrabi/sequence.hpp"

namespace nvrabi {

enum class Window { Rectangular };

struct Spectrum {
  double bin_width = 0.0;        // Hz, = 1/source_duration
  std::vector<double> frequency; // Hz
  std::vector<double> amplitude; // signal/sqrt(Hz)
  Window window = Window::Rectangular;
  double source_duration = 0.0;     // s
  double source_sample_rate = 0.0;  // Hz
};

struct SensitivityReport {
  double sigma_s = 0.0;     // signal units
  double slope = 0.0;       // signal per rad/s
  double enbw = 0.0;        // Hz
  double sigma_b = 0.0;     // tesla
  double eta = 0.0;         // tesla/sqrt(Hz)
  double eta_shot = 0.0;    // tesla/sqrt(Hz)
};

// Single-sided amplitude spectral density with rectangular windowing. An
// on-bin sinusoid of amplitude A yields bin amplitude A/sqrt(2*bin_width);
// sum(bin^2) * bin_width equals the time-domain mean square (Parseval).
Spectrum asd(const TimeSeries& series);

struct BandRms {
  double sigma_s = 0.0;
  double enbw = 0.0;  // Hz
};

// Brick-wall high-pass: zeroes every bin below the cutoff and reports the rms
// of the retained band in time-domain units. Band-counting convention: the
// DC bin never counts; f_ENBW counts retained bins up to sample_rate/2 -
// bin_width, which reproduces f_ENBW = 3207 Hz for a 1 s record at 6.615 kHz
// with a 100 Hz cutoff (bins 100..3306 Hz). The topmost half-covered bin
// still contributes to sigma_S so that a zero cutoff reproduces the
// mean-removed time-domain standard deviation exactly.
BandRms highpass_rms(const Spectrum& spec, double cutoff);

// Spectrum with every bin below the cutoff zeroed (idempotent).
Spectrum apply_highpass(Spectrum spec, double cutoff);

// eta = sqrt(3)/(gamma*slope) * sigma_S/sqrt(2*f_ENBW); sigma_B in tesla.
SensitivityReport calibrate_sensitivity(double sigma_s, double slope,
                                        double enbw, double gamma);

// Analytic shot-noise-limited sensitivity:
// eta = (sqrt2/gamma) (1/F_perp) (1/sqrt(N n_avg)) (1/(C exp(-(tau/T2rho)^p)))
//       sqrt(tau + t_O)/tau
struct ContrastInputs {
  double contrast;  // C
  double t2_rho;    // s
  double stretch;   // p
  double tau;       // s
};
double shot_noise_limit(const EnsembleParams& ens, const SequenceParams& seq,
                        const ContrastInputs& in);

}  // namespace nvrabi
