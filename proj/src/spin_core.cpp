#include "nvrabi/spin_core.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "nvrabi/units.hpp"

namespace nvrabi {

double rabi_population(const DriveParams& drive, double tau) {
  if (tau < 0.0) throw std::domain_error("rabi_population: tau must be >= 0");
  if (drive.rabi_frequency < 0.0)
    throw std::domain_error("rabi_population: rabi_frequency must be >= 0");
  const double w2 = drive.rabi_frequency * drive.rabi_frequency +
                    drive.detuning * drive.detuning;
  if (w2 == 0.0) return 0.0;
  const double s = std::sin(0.5 * std::sqrt(w2) * tau);
  return (drive.rabi_frequency * drive.rabi_frequency / w2) * s * s;
}

namespace {

using State = std::array<std::complex<double>, 2>;

// dpsi/dt = -i H psi with H = [[-d/2, W/2], [W/2, d/2]]
inline State deriv(const State& psi, double half_rabi, double half_det) {
  const std::complex<double> mi(0.0, -1.0);
  return {mi * (-half_det * psi[0] + half_rabi * psi[1]),
          mi * (half_rabi * psi[0] + half_det * psi[1])};
}

}  // namespace

double bloch_integrate(const DriveParams& drive, double tau, double step) {
  if (tau < 0.0) throw std::domain_error("bloch_integrate: tau must be >= 0");
  if (step <= 0.0)
    throw std::invalid_argument("bloch_integrate: step must be > 0");
  if (tau == 0.0) return 0.0;
  if (step > tau / 100.0)
    throw std::invalid_argument("bloch_integrate: step must be <= tau/100");
  const double weff = std::hypot(drive.rabi_frequency, drive.detuning);
  if (weff * step > 0.05)
    throw std::invalid_argument(
        "bloch_integrate: step too coarse for precession frequency");

  const auto n = static_cast<std::size_t>(std::ceil(tau / step));
  const double h = tau / static_cast<double>(n);
  const double hw = 0.5 * drive.rabi_frequency;
  const double hd = 0.5 * drive.detuning;

  State psi{{{1.0, 0.0}, {0.0, 0.0}}};
  for (std::size_t i = 0; i < n; ++i) {
    const State k1 = deriv(psi, hw, hd);
    State tmp{psi[0] + 0.5 * h * k1[0], psi[1] + 0.5 * h * k1[1]};
    const State k2 = deriv(tmp, hw, hd);
    tmp = {psi[0] + 0.5 * h * k2[0], psi[1] + 0.5 * h * k2[1]};
    const State k3 = deriv(tmp, hw, hd);
    tmp = {psi[0] + h * k3[0], psi[1] + h * k3[1]};
    const State k4 = deriv(tmp, hw, hd);
    psi[0] += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    psi[1] += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  }
  return std::norm(psi[1]);
}

double hyperfine_weight(const HyperfineModel& hf, double tau) {
  const double s = std::sin(M_PI * hf.beat_frequency * tau);
  return hf.modulation_depth * s * s;
}

double hyperfine_population(const DriveParams& drive, const HyperfineModel& hf,
                            double tau) {
  if (hf.modulation_depth < 0.0 || hf.modulation_depth > 1.0)
    throw std::domain_error("hyperfine_population: depth must be in [0, 1]");
  if (hf.beat_frequency < 0.0)
    throw std::domain_error("hyperfine_population: beat frequency must be >= 0");
  const double w = hyperfine_weight(hf, tau);
  if (w == 0.0) return rabi_population(drive, tau);
  DriveParams shifted = drive;
  shifted.detuning += hf.hf_detuning;
  return (1.0 - w) * rabi_population(drive, tau) +
         w * rabi_population(shifted, tau);
}

double effective_rabi(const FieldVector& fields, double gamma) {
  if (gamma <= 0.0)
    throw std::domain_error("effective_rabi: gamma must be > 0");
  if (fields.drive_amplitude < 0.0 || fields.signal_amplitude < 0.0)
    throw std::domain_error("effective_rabi: field amplitudes must be >= 0");
  const double b = fields.drive_amplitude +
                   fields.signal_amplitude * std::cos(fields.relative_phase);
  return gamma * std::fabs(b) / kSqrt3;
}

}  // namespace nvrabi
