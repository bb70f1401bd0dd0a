#pragma once

#include <span>
#include <vector>

namespace nvrabi {

// Levenberg-Marquardt fit of y(t) = offset - amp * exp(-(t/T)^p) * cos(w t + phi).
// The stretch exponent is constrained to [0.5, 3].

struct DampedCosineFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double decay_time = 0.0;  // s
  double stretch = 1.0;
  double omega = 0.0;       // rad/s
  double phase = 0.0;       // rad
  double residual_rms = 0.0;
  bool converged = false;
  bool degenerate = false;  // no resolvable oscillation in the input
};

struct DampedCosineOptions {
  bool pin_stretch = false;     // hold p fixed at stretch_init
  double stretch_init = 1.0;
  int max_iterations = 400;
};

DampedCosineFit fit_damped_cosine(std::span<const double> t,
                                  std::span<const double> y,
                                  const DampedCosineOptions& opt = {});

}  // namespace nvrabi
