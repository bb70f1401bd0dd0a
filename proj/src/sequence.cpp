#include "nvrabi/sequence.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include "nvrabi/units.hpp"

namespace nvrabi {

void SequenceParams::validate() const {
  if (mw_duration <= 0.0)
    throw std::invalid_argument("sequence.mw_duration must be > 0");
  if (overhead < 0.0) throw std::invalid_argument("sequence.overhead must be >= 0");
  if (sequence_rate <= 0.0)
    throw std::invalid_argument("sequence.sequence_rate must be > 0");
  if (std::fabs(data_rate - 0.5 * sequence_rate) > 1e-9 * sequence_rate)
    throw std::invalid_argument("sequence.data_rate must equal sequence_rate/2");
  if (pi_fidelity < 0.0 || pi_fidelity > 1.0)
    throw std::invalid_argument("sequence.pi_fidelity must be in [0, 1]");
}

double subtracted_signal(double population, Protocol protocol,
                         double pi_fidelity) {
  if (population < 0.0 || population > 1.0)
    throw std::domain_error("subtracted_signal: population must be in [0, 1]");
  if (protocol == Protocol::OnOff) return -population;
  return pi_fidelity * (2.0 * population - 1.0);
}

double subtracted_ensemble_value(const std::vector<SpinSample>& samples,
                                 const HyperfineModel& hf, double tau,
                                 double contrast_ceiling, Protocol protocol,
                                 double pi_fidelity) {
  const double w = hyperfine_weight(hf, tau);
  HyperfineModel off;  // resonant branch only
  const double p_res = ensemble_population(samples, off, tau);
  if (protocol == Protocol::PiPulse)
    return contrast_ceiling * pi_fidelity * (1.0 - w) * (2.0 * p_res - 1.0);
  double p_det = 0.0;
  if (w != 0.0) {
    std::vector<SpinSample> shifted = samples;
    for (auto& s : shifted) s.detuning += hf.hf_detuning;
    p_det = ensemble_population(shifted, off, tau);
  }
  return -contrast_ceiling * ((1.0 - w) * p_res + w * p_det);
}

TimeSeries render_time_series(const std::function<double(double)>& omega_of_t,
                              const EnsembleParams& ens,
                              const SequenceParams& seq,
                              const HyperfineModel& hf, double duration,
                              std::uint64_t seed, std::size_t n_samples) {
  seq.validate();
  if (duration < 2.0 / seq.data_rate)
    throw std::invalid_argument("render_time_series: duration below two samples");
  const auto n = static_cast<std::size_t>(std::llround(duration * seq.data_rate));
  // relative inhomogeneity draw; scaled to the instantaneous drive per sample
  const auto rel = sample_ensemble(ens, 1.0, n_samples, seed);

  TimeSeries out;
  out.sample_rate = seq.data_rate;
  out.start_time = 0.0;
  out.samples.resize(n);
  std::map<double, double> memo;  // S(Omega) cache for repeated drive values
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / seq.data_rate;
    const double omega = omega_of_t(t);
    if (omega < 0.0)
      throw std::domain_error("render_time_series: omega_of_t returned < 0");
    auto it = memo.find(omega);
    if (it == memo.end()) {
      std::vector<SpinSample> scaled = rel;
      for (auto& s : scaled) s.rabi_frequency *= omega;
      const double value =
          subtracted_ensemble_value(scaled, hf, seq.mw_duration,
                                    ens.contrast_ceiling, seq.protocol,
                                    seq.pi_fidelity);
      it = memo.emplace(omega, value).first;
      if (memo.size() > 4096) memo.clear();
    }
    out.samples[k] = it->second;
  }
  return out;
}

namespace {

// single-bin amplitude of the mean-removed trace at frequency f (per tau)
double trace_tone(const RabiTrace& tr, double f) {
  double mean = 0.0;
  for (double v : tr.signal) mean += v;
  mean /= static_cast<double>(tr.signal.size());
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < tr.tau_grid.size(); ++i)
    acc += (tr.signal[i] - mean) *
           std::exp(std::complex<double>(0.0, -kTwoPi * f * tr.tau_grid[i]));
  return std::abs(acc) * 2.0 / static_cast<double>(tr.signal.size());
}

// carrier amplitude: peak of a coarse frequency scan away from the beat line
double carrier_amplitude(const RabiTrace& tr, double beat_frequency) {
  const double span = tr.tau_grid.back() - tr.tau_grid.front();
  const double df = 0.5 / span;
  const std::size_t nf = tr.tau_grid.size();
  double best = 0.0;
  for (std::size_t j = 1; j <= nf; ++j) {
    const double f = df * static_cast<double>(j);
    if (std::fabs(f - beat_frequency) < 4.0 * df) continue;
    best = std::max(best, trace_tone(tr, f));
  }
  return best;
}

}  // namespace

double hyperfine_suppression_metric(const RabiTrace& trace_onoff,
                                    const RabiTrace& trace_pi,
                                    double beat_frequency) {
  if (trace_onoff.tau_grid != trace_pi.tau_grid)
    throw std::invalid_argument("hyperfine_suppression_metric: tau grids differ");
  if (trace_onoff.tau_grid.size() < 8)
    throw std::invalid_argument("hyperfine_suppression_metric: trace too short");

  const double car_on = carrier_amplitude(trace_onoff, beat_frequency);
  const double car_pi = carrier_amplitude(trace_pi, beat_frequency);
  if (car_on <= 0.0 || car_pi <= 0.0)
    throw std::domain_error("hyperfine_suppression_metric: zero carrier power");

  const double floor_on = 1e-9 * car_on;
  const double floor_pi = 1e-9 * car_pi;
  const double sb_on = std::max(trace_tone(trace_onoff, beat_frequency), floor_on);
  const double sb_pi = std::max(trace_tone(trace_pi, beat_frequency), floor_pi);
  const double idx_on = (sb_on / car_on) * (sb_on / car_on);
  const double idx_pi = (sb_pi / car_pi) * (sb_pi / car_pi);
  return idx_pi / idx_on;
}

RabiTrace subtracted_rabi_trace(const EnsembleParams& params,
                                double omega_nominal,
                                const std::vector<double>& tau_grid,
                                const HyperfineModel& hf, Protocol protocol,
                                double pi_fidelity, std::size_t n_samples,
                                std::uint64_t seed) {
  const auto samples =
      sample_ensemble(params, omega_nominal, n_samples, seed);
  RabiTrace tr;
  tr.tau_grid = tau_grid;
  tr.signal.resize(tau_grid.size());
  tr.drive_omega = omega_nominal;
  tr.protocol_tag = protocol == Protocol::PiPulse ? "pi-pulse" : "on-off";
  for (std::size_t i = 0; i < tau_grid.size(); ++i)
    tr.signal[i] =
        subtracted_ensemble_value(samples, hf, tau_grid[i],
                                  params.contrast_ceiling, protocol,
                                  pi_fidelity);
  return tr;
}

}  // namespace nvrabi
