#include "nvrabi/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "nvrabi/units.hpp"

namespace nvrabi {

double fom(double contrast, double t2_rho, double stretch, double tau,
           double overhead) {
  if (t2_rho <= 0.0 || tau <= 0.0)
    throw std::invalid_argument("fom: tau and T2rho must be > 0");
  if (overhead < 0.0) throw std::invalid_argument("fom: overhead must be >= 0");
  return contrast * std::exp(-std::pow(tau / t2_rho, stretch)) * tau /
         std::sqrt(tau + overhead);
}

TauSearchResult optimal_tau(double contrast, double t2_rho, double stretch,
                            double overhead, double tau_lo, double tau_hi,
                            double grid_step) {
  if (!(tau_lo > 0.0) || !(tau_hi > tau_lo) || !(grid_step > 0.0))
    throw std::invalid_argument("optimal_tau: bad search range");
  double best_tau = tau_lo;
  double best_f = -1.0;
  for (double tau = tau_lo; tau <= tau_hi + 0.5 * grid_step; tau += grid_step) {
    const double t = std::min(tau, tau_hi);
    const double f = fom(contrast, t2_rho, stretch, t, overhead);
    if (f > best_f) {
      best_f = f;
      best_tau = t;
    }
  }

  TauSearchResult out;
  const double eps = 1e-12;
  if (best_tau <= tau_lo + eps || best_tau >= tau_hi - eps) {
    out.tau_opt = best_tau;
    out.fom_max = best_f;
    out.at_boundary = true;
    return out;
  }

  // golden-section refinement around the best grid cell
  const double invphi = 0.6180339887498949;
  double a = std::max(tau_lo, best_tau - grid_step);
  double b = std::min(tau_hi, best_tau + grid_step);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = fom(contrast, t2_rho, stretch, x1, overhead);
  double f2 = fom(contrast, t2_rho, stretch, x2, overhead);
  while (b - a > 1e-9 * best_tau) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fom(contrast, t2_rho, stretch, x2, overhead);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fom(contrast, t2_rho, stretch, x1, overhead);
    }
  }
  out.tau_opt = 0.5 * (a + b);
  out.fom_max = fom(contrast, t2_rho, stretch, out.tau_opt, overhead);
  out.at_boundary = false;
  return out;
}

FomSweep fom_sweep(const std::vector<OmegaCharacterization>& table,
                   double overhead, double tau_lo, double tau_hi) {
  if (table.empty()) throw std::invalid_argument("fom_sweep: empty table");
  FomSweep sweep;
  sweep.points.reserve(table.size());
  for (const auto& row : table) {
    const TauSearchResult r =
        optimal_tau(row.contrast, row.t2_rho, row.stretch, overhead, tau_lo,
                    tau_hi);
    sweep.points.push_back({row.omega, r.tau_opt, r.fom_max, r.at_boundary});
  }
  // ties break toward lower omega: strict > on a low-to-high omega scan
  sweep.argmax = 0;
  for (std::size_t i = 1; i < sweep.points.size(); ++i)
    if (sweep.points[i].fom_value > sweep.points[sweep.argmax].fom_value)
      sweep.argmax = i;
  return sweep;
}

SlopeScan slope_scan(const EnsembleParams& ens, const SequenceParams& seq,
                     const HyperfineModel& hf,
                     const std::vector<double>& omega_grid,
                     std::size_t n_samples, std::uint64_t seed) {
  seq.validate();
  if (omega_grid.size() < 3)
    throw std::invalid_argument("slope_scan: need at least 3 grid points");
  const double fringe_period = kTwoPi / seq.mw_duration;  // in omega
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    const double step = omega_grid[i] - omega_grid[i - 1];
    if (!(step > 0.0))
      throw std::invalid_argument("slope_scan: omega_grid must be increasing");
    if (step >= fringe_period / 10.0)
      throw std::invalid_argument("slope_scan: grid too coarse to resolve the fringe");
  }

  const auto rel = sample_ensemble(ens, 1.0, n_samples, seed);
  SlopeScan scan;
  scan.omega = omega_grid;
  scan.signal.resize(omega_grid.size());
  std::vector<SpinSample> scaled(rel.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    for (std::size_t j = 0; j < rel.size(); ++j)
      scaled[j] = {rel[j].detuning, rel[j].rabi_frequency * omega_grid[i]};
    scan.signal[i] =
        subtracted_ensemble_value(scaled, hf, seq.mw_duration,
                                  ens.contrast_ceiling, seq.protocol,
                                  seq.pi_fidelity);
  }

  double best = -1.0;
  for (std::size_t i = 1; i + 1 < scan.omega.size(); ++i) {
    const double slope = std::fabs((scan.signal[i + 1] - scan.signal[i - 1]) /
                                   (scan.omega[i + 1] - scan.omega[i - 1]));
    if (slope > best) {
      best = slope;
      scan.omega_opt = scan.omega[i];
    }
  }
  scan.slope = best;
  return scan;
}

}  // namespace nvrabi
