#pragma once

#include <functional>

namespace nvrabi {

// Rotating-frame drive description. Carrier and resonance are informational;
// the dynamics depend on (rabi_frequency, detuning) only.
struct DriveParams {
  double rabi_frequency = 0.0;  // rad/s, >= 0
  double detuning = 0.0;        // rad/s
  double carrier = 0.0;         // rad/s, informational
  double resonance = 0.0;       // rad/s, informational
};

// Phenomenological hyperfine beat model: a slowly oscillating fraction of the
// population sits in a far-detuned hyperfine manifold. The parameters are
// configuration knobs, not measured constants.
struct HyperfineModel {
  double beat_frequency = 0.0;     // Hz, >= 0
  double modulation_depth = 0.0;   // in [0, 1]
  double hf_detuning = 0.0;        // rad/s
};

// Drive plus small co-axial signal field.
struct FieldVector {
  double drive_amplitude = 0.0;   // tesla, >= 0
  double signal_amplitude = 0.0;  // tesla, >= 0
  double relative_phase = 0.0;    // rad
};

// Closed-form resonant/detuned Rabi population of the upper state.
// P(tau) = Omega^2/(Omega^2+delta^2) * sin^2(sqrt(Omega^2+delta^2)*tau/2).
// Omega = delta = 0 returns 0 by continuity. Throws std::domain_error for
// negative tau or negative Omega.
double rabi_population(const DriveParams& drive, double tau);

// Independent check on the closed form: RK4 integration of the two-level
// Schroedinger equation in the rotating frame. step must be positive and at
// most tau/100 (for tau > 0); steps too coarse for the precession frequency
// are rejected as non-convergent.
double bloch_integrate(const DriveParams& drive, double tau, double step);

// Oscillating admixture weight w(tau) = depth * sin^2(pi * f_beat * tau).
double hyperfine_weight(const HyperfineModel& hf, double tau);

// Mixture (1-w)P(delta) + w P(delta + hf_detuning); equals rabi_population
// when modulation_depth = 0.
double hyperfine_population(const DriveParams& drive, const HyperfineModel& hf,
                            double tau);

// Co-axial composition of drive and signal fields projected onto the plane
// transverse to the NV axes: gamma * |B + dB cos(phi)| / sqrt(3).
double effective_rabi(const FieldVector& fields, double gamma);

}  // namespace nvrabi
