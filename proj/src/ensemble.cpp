#include "nvrabi/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "nvrabi/rng.hpp"

namespace nvrabi {

void EnsembleParams::validate() const {
  if (gamma <= 0.0) throw std::invalid_argument("ensemble.gamma must be > 0");
  if (!(t2_star > 0.0)) throw std::invalid_argument("ensemble.t2_star must be > 0");
  if (mw_inhomogeneity < 0.0 || mw_inhomogeneity >= 1.0)
    throw std::invalid_argument("ensemble.mw_inhomogeneity must be in [0, 1)");
  if (nv_count < 1.0) throw std::invalid_argument("ensemble.nv_count must be >= 1");
  if (photons_per_nv <= 0.0)
    throw std::invalid_argument("ensemble.photons_per_nv must be > 0");
  if (contrast_ceiling <= 0.0 || contrast_ceiling >= 1.0)
    throw std::invalid_argument("ensemble.contrast_ceiling must be in (0, 1)");
  if (stretch < 1.0) throw std::invalid_argument("ensemble.stretch must be >= 1");
  if (projection <= 0.0 || projection > 1.0)
    throw std::invalid_argument("ensemble.projection must be in (0, 1]");
  if (bias_field < 0.0) throw std::invalid_argument("ensemble.bias_field must be >= 0");
}

std::vector<SpinSample> sample_ensemble(const EnsembleParams& params,
                                        double omega_nominal,
                                        std::size_t n_samples,
                                        std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("sample_ensemble: n_samples must be >= 1");
  params.validate();
  const double hwhm = std::isinf(params.t2_star) ? 0.0 : 1.0 / params.t2_star;
  std::vector<SpinSample> out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(seed, rng_tag::kEnsembleSample, i);
    const double detuning =
        hwhm == 0.0 ? 0.0 : hwhm * std::tan(M_PI * (rng.uniform() - 0.5));
    const double omega =
        omega_nominal * (1.0 + params.mw_inhomogeneity * rng.gaussian());
    out[i] = {detuning, std::fabs(omega)};
  }
  return out;
}

namespace {

struct BranchMeans {
  double resonant;  // <P(delta_i, Omega_i)>
  double detuned;   // <P(delta_i + hf_detuning, Omega_i)>
};

double mean_population(const std::vector<SpinSample>& samples,
                       double extra_detuning, double tau) {
  double acc = 0.0;
  for (const auto& s : samples) {
    const double d = s.detuning + extra_detuning;
    const double w2 = s.rabi_frequency * s.rabi_frequency + d * d;
    if (w2 == 0.0) continue;
    const double sn = std::sin(0.5 * std::sqrt(w2) * tau);
    acc += (s.rabi_frequency * s.rabi_frequency / w2) * sn * sn;
  }
  return acc / static_cast<double>(samples.size());
}

BranchMeans branch_means(const std::vector<SpinSample>& samples,
                         const HyperfineModel& hf, double tau, double w) {
  BranchMeans m{mean_population(samples, 0.0, tau), 0.0};
  if (w != 0.0) m.detuned = mean_population(samples, hf.hf_detuning, tau);
  return m;
}

}  // namespace

double ensemble_population(const std::vector<SpinSample>& samples,
                           const HyperfineModel& hf, double tau) {
  const double w = hyperfine_weight(hf, tau);
  const BranchMeans m = branch_means(samples, hf, tau, w);
  return (1.0 - w) * m.resonant + w * m.detuned;
}

RabiTrace ensemble_rabi_trace(const EnsembleParams& params,
                              double omega_nominal,
                              const std::vector<double>& tau_grid,
                              const HyperfineModel& hf, std::size_t n_samples,
                              std::uint64_t seed) {
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw std::invalid_argument("ensemble_rabi_trace: tau_grid must be strictly increasing");
  const auto samples = sample_ensemble(params, omega_nominal, n_samples, seed);
  RabiTrace trace;
  trace.tau_grid = tau_grid;
  trace.signal.resize(tau_grid.size());
  trace.drive_omega = omega_nominal;
  trace.protocol_tag = "raw";
  for (std::size_t i = 0; i < tau_grid.size(); ++i)
    trace.signal[i] = 1.0 - params.contrast_ceiling *
                                ensemble_population(samples, hf, tau_grid[i]);
  return trace;
}

FitResult fit_rabi_decay(const RabiTrace& trace, bool pin_stretch,
                         double pinned_stretch) {
  DampedCosineOptions opt;
  opt.pin_stretch = pin_stretch;
  opt.stretch_init = pinned_stretch;
  const DampedCosineFit f =
      fit_damped_cosine(trace.tau_grid, trace.signal, opt);
  FitResult r;
  r.contrast = 2.0 * f.amplitude;
  r.t2_rho = f.decay_time;
  r.stretch = f.stretch;
  r.omega_fit = f.omega;
  r.phase = f.phase;
  r.offset = f.offset;
  r.residual_rms = f.residual_rms;
  r.converged = f.converged;
  r.degenerate = f.degenerate;
  if (f.degenerate) r.contrast = 0.0;
  return r;
}

std::vector<OmegaCharacterization> characterize_vs_omega(
    const EnsembleParams& params, const std::vector<double>& omega_list,
    double tau_max, double tau_step, const HyperfineModel& hf,
    double pi_fidelity, std::size_t n_samples, std::uint64_t seed) {
  if (omega_list.empty())
    throw std::invalid_argument("characterize_vs_omega: omega_list is empty");
  if (tau_step <= 0.0 || tau_max <= tau_step)
    throw std::invalid_argument("characterize_vs_omega: bad tau grid");
  std::vector<OmegaCharacterization> table;
  table.reserve(omega_list.size());
  for (double omega : omega_list) {
    if (omega <= 0.0)
      throw std::invalid_argument("characterize_vs_omega: omega must be > 0");
    const double span = std::max(tau_max, 3.5 * kTwoPi / omega);
    std::vector<double> taus;
    for (double t = tau_step; t < span; t += tau_step) taus.push_back(t);

    const auto samples = sample_ensemble(params, omega, n_samples, seed);
    RabiTrace trace;
    trace.tau_grid = taus;
    trace.signal.resize(taus.size());
    trace.drive_omega = omega;
    trace.protocol_tag = "pi-pulse";
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double w = hyperfine_weight(hf, taus[i]);
      const BranchMeans m = branch_means(samples, hf, taus[i], w);
      trace.signal[i] = params.contrast_ceiling * pi_fidelity * (1.0 - w) *
                        (2.0 * m.resonant - 1.0);
    }
    const FitResult f = fit_rabi_decay(trace);
    OmegaCharacterization row;
    row.omega = omega;
    // subtracted-trace amplitude A = C * pi_fidelity
    row.contrast = 0.5 * f.contrast / pi_fidelity;
    row.t2_rho = f.t2_rho;
    row.stretch = f.stretch;
    row.residual_rms = f.residual_rms;
    row.converged = f.converged && !f.degenerate;
    table.push_back(row);
  }
  return table;
}

}  // namespace nvrabi
