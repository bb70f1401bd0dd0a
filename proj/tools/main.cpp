#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nvrabi/comms.hpp"
#include "nvrabi/config.hpp"
#include "nvrabi/ensemble.hpp"
#include "nvrabi/noise.hpp"
#include "nvrabi/optimize.hpp"
#include "nvrabi/rng.hpp"
#include "nvrabi/sequence.hpp"
#include "nvrabi/spectral.hpp"
#include "nvrabi/units.hpp"

namespace {

using namespace nvrabi;

std::string num(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << "\n";
  if (columns.empty()) return;
  const std::size_t rows = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw std::logic_error("csv column length mismatch");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << num(columns[c][r]);
    out << "\n";
  }
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.run.output_dir);
  return (std::filesystem::path(cfg.run.output_dir) / name).string();
}

std::vector<double> tau_grid(double tau_max, double tau_step) {
  std::vector<double> grid;
  for (double t = tau_step; t <= tau_max * (1.0 + 1e-12); t += tau_step)
    grid.push_back(t);
  if (grid.empty()) throw std::invalid_argument("run.tau_max too small for tau_step");
  return grid;
}

std::vector<double> omega_sweep_grid(const RunParams& r) {
  std::vector<double> grid;
  if (r.omega_points == 1) {
    grid.push_back(r.omega_min);
    return grid;
  }
  // log spacing: the trends of interest span a decade
  const double ratio = r.omega_max / r.omega_min;
  for (std::size_t i = 0; i < r.omega_points; ++i)
    grid.push_back(r.omega_min *
                   std::pow(ratio, static_cast<double>(i) /
                                       static_cast<double>(r.omega_points - 1)));
  return grid;
}

// Fringe-resolving omega grid centered on the operating point.
std::vector<double> slope_grid(double omega_center, double tau) {
  const double fringe = kTwoPi / tau;
  const double step = fringe / 40.0;
  std::vector<double> grid;
  for (int i = -30; i <= 30; ++i) {
    const double w = omega_center + i * step;
    if (w > 0.0) grid.push_back(w);
  }
  return grid;
}

TimeSeries noisy_pipeline(const TimeSeries& clean, const RunConfig& cfg) {
  TimeSeries s = clean;
  if (cfg.noise.shot_noise_enabled)
    s = apply_shot_noise(s, cfg.ensemble, cfg.sequence, cfg.noise.seed);
  s = apply_laser_noise(s, cfg.noise);
  return s;
}

int cmd_rabi_trace(const RunConfig& cfg) {
  const auto grid = tau_grid(cfg.run.tau_max, cfg.run.tau_step);
  const auto t_onoff =
      subtracted_rabi_trace(cfg.ensemble, cfg.run.omega, grid, cfg.hyperfine,
                            Protocol::OnOff, cfg.sequence.pi_fidelity,
                            cfg.run.n_samples, cfg.run.seed);
  const auto t_pi =
      subtracted_rabi_trace(cfg.ensemble, cfg.run.omega, grid, cfg.hyperfine,
                            Protocol::PiPulse, cfg.sequence.pi_fidelity,
                            cfg.run.n_samples, cfg.run.seed);
  std::vector<double> tau_us(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) tau_us[i] = grid[i] * 1e6;
  write_csv(out_path(cfg, "trace_on_off.csv"),
            "tau_us,subtracted_signal_norm_fluor", {tau_us, t_onoff.signal});
  write_csv(out_path(cfg, "trace_pi_pulse.csv"),
            "tau_us,subtracted_signal_norm_fluor", {tau_us, t_pi.signal});

  std::cout << "config_hash = " << config_hash(cfg) << "\n";
  for (const auto* tr : {&t_onoff, &t_pi}) {
    const FitResult f = fit_rabi_decay(*tr);
    std::cout << "protocol = " << tr->protocol_tag
              << "  C = " << num(f.contrast)
              << "  T2rho_us = " << num(f.t2_rho * 1e6)
              << "  p = " << num(f.stretch)
              << "  omega_fit_hz = " << num(f.omega_fit / kTwoPi)
              << "  converged = " << (f.converged ? 1 : 0) << "\n";
  }
  const double supp =
      hyperfine_suppression_metric(t_onoff, t_pi, cfg.hyperfine.beat_frequency);
  std::cout << "hyperfine_suppression_ratio = " << num(supp) << "\n";
  return 0;
}

int cmd_characterize(const RunConfig& cfg) {
  const auto omegas = omega_sweep_grid(cfg.run);
  const auto table = characterize_vs_omega(
      cfg.ensemble, omegas, cfg.run.tau_max, cfg.run.tau_step, cfg.hyperfine,
      cfg.sequence.pi_fidelity, cfg.run.n_samples, cfg.run.seed);
  std::vector<double> w_hz, c, t2_us, p, rms, conv;
  for (const auto& row : table) {
    w_hz.push_back(row.omega / kTwoPi);
    c.push_back(row.contrast);
    t2_us.push_back(row.t2_rho * 1e6);
    p.push_back(row.stretch);
    rms.push_back(row.residual_rms);
    conv.push_back(row.converged ? 1.0 : 0.0);
  }
  write_csv(out_path(cfg, "characterize.csv"),
            "omega_hz,contrast,t2_rho_us,stretch,residual_rms,converged",
            {w_hz, c, t2_us, p, rms, conv});
  std::cout << "config_hash = " << config_hash(cfg) << "\n"
            << "rows = " << table.size() << "\n";
  for (const auto& row : table)
    if (!row.converged)
      throw std::runtime_error("fit failed at omega_hz = " +
                               num(row.omega / kTwoPi));
  return 0;
}

int cmd_optimize(const RunConfig& cfg) {
  const auto omegas = omega_sweep_grid(cfg.run);
  const auto table = characterize_vs_omega(
      cfg.ensemble, omegas, cfg.run.tau_max, cfg.run.tau_step, cfg.hyperfine,
      cfg.sequence.pi_fidelity, cfg.run.n_samples, cfg.run.seed);
  for (const auto& row : table)
    if (!row.converged)
      throw std::runtime_error("fit failed at omega_hz = " +
                               num(row.omega / kTwoPi));
  const FomSweep sweep = fom_sweep(table, cfg.sequence.overhead);
  std::vector<double> w_hz, tau_us, fval, bnd;
  for (const auto& pt : sweep.points) {
    w_hz.push_back(pt.omega / kTwoPi);
    tau_us.push_back(pt.tau_opt * 1e6);
    fval.push_back(pt.fom_value);
    bnd.push_back(pt.at_boundary ? 1.0 : 0.0);
  }
  write_csv(out_path(cfg, "fom_sweep.csv"),
            "omega_hz,tau_opt_us,fom_sqrt_s,at_boundary",
            {w_hz, tau_us, fval, bnd});

  const FomPoint& best = sweep.points[sweep.argmax];
  SequenceParams seq = cfg.sequence;
  seq.mw_duration = best.tau_opt;
  const SlopeScan scan =
      slope_scan(cfg.ensemble, seq, cfg.hyperfine,
                 slope_grid(best.omega, best.tau_opt), cfg.run.n_samples,
                 cfg.run.seed);
  std::vector<double> sw_hz(scan.omega.size());
  for (std::size_t i = 0; i < scan.omega.size(); ++i)
    sw_hz[i] = scan.omega[i] / kTwoPi;
  write_csv(out_path(cfg, "slope_scan.csv"),
            "omega_hz,subtracted_signal_norm_fluor", {sw_hz, scan.signal});

  std::cout << "config_hash = " << config_hash(cfg) << "\n"
            << "omega_opt_hz = " << num(best.omega / kTwoPi) << "\n"
            << "tau_opt_us = " << num(best.tau_opt * 1e6) << "\n"
            << "fom_max = " << num(best.fom_value) << "\n"
            << "at_boundary = " << (best.at_boundary ? 1 : 0) << "\n"
            << "slope_omega_opt_hz = " << num(scan.omega_opt / kTwoPi) << "\n"
            << "slope_per_rad_s = " << num(scan.slope) << "\n";
  return 0;
}

struct OperatingPoint {
  double omega_work = 0.0;  // steepest-slope drive, rad/s
  double slope = 0.0;       // signal per rad/s
  ContrastInputs inputs{};
};

OperatingPoint operating_point(const RunConfig& cfg) {
  const SlopeScan scan =
      slope_scan(cfg.ensemble, cfg.sequence, cfg.hyperfine,
                 slope_grid(cfg.run.omega, cfg.sequence.mw_duration),
                 cfg.run.n_samples, cfg.run.seed);
  const auto table = characterize_vs_omega(
      cfg.ensemble, {cfg.run.omega}, cfg.run.tau_max, cfg.run.tau_step,
      cfg.hyperfine, cfg.sequence.pi_fidelity, cfg.run.n_samples,
      cfg.run.seed);
  if (!table.front().converged)
    throw std::runtime_error("decay fit failed at the operating point");
  OperatingPoint op;
  op.omega_work = scan.omega_opt;
  op.slope = scan.slope;
  op.inputs = {table.front().contrast, table.front().t2_rho,
               table.front().stretch, cfg.sequence.mw_duration};
  return op;
}

int cmd_sense(const RunConfig& cfg, bool with_signal) {
  if (cfg.run.duration < 2.0 / cfg.sequence.data_rate)
    throw std::invalid_argument("run.duration must cover at least two samples");
  const OperatingPoint op = operating_point(cfg);

  std::function<double(double)> omega_of_t;
  if (with_signal) {
    const double drive_field = op.omega_work * kSqrt3 / cfg.ensemble.gamma;
    omega_of_t = synthesize_omega(cfg.modulation, drive_field,
                                  cfg.ensemble.gamma);
  } else {
    const double w = op.omega_work;
    omega_of_t = [w](double) { return w; };
  }

  const TimeSeries clean =
      render_time_series(omega_of_t, cfg.ensemble, cfg.sequence, cfg.hyperfine,
                         cfg.run.duration, cfg.run.seed, cfg.run.n_samples);
  const TimeSeries noisy = noisy_pipeline(clean, cfg);

  std::vector<double> t(noisy.samples.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = noisy.start_time + static_cast<double>(i) / noisy.sample_rate;
  write_csv(out_path(cfg, "timeseries.csv"), "time_s,signal_norm_fluor",
            {t, noisy.samples});

  const Spectrum spec = asd(noisy);
  write_csv(out_path(cfg, "asd.csv"), "frequency_hz,asd_norm_fluor_per_rthz",
            {spec.frequency, spec.amplitude});

  const BandRms band = highpass_rms(spec, cfg.run.highpass_cutoff);
  SensitivityReport rep = calibrate_sensitivity(band.sigma_s, op.slope,
                                                band.enbw, cfg.ensemble.gamma);
  rep.eta_shot = shot_noise_limit(cfg.ensemble, cfg.sequence, op.inputs);

  std::cout << "config_hash = " << config_hash(cfg) << "\n"
            << "omega_work_hz = " << num(op.omega_work / kTwoPi) << "\n"
            << "slope_per_rad_s = " << num(op.slope) << "\n"
            << "sigma_s = " << num(rep.sigma_s) << "\n"
            << "enbw_hz = " << num(rep.enbw) << "\n"
            << "sigma_b_t = " << num(rep.sigma_b) << "\n"
            << "eta_t_per_rthz = " << num(rep.eta) << "\n"
            << "eta_shot_t_per_rthz = " << num(rep.eta_shot) << "\n"
            << "eta_ratio = " << num(rep.eta / rep.eta_shot) << "\n";
  return 0;
}

int cmd_demod(const RunConfig& cfg, const std::string& mode) {
  RunConfig c = cfg;
  if (mode == "am")
    c.modulation.kind = ModulationKind::AmSine;
  else if (mode == "bpsk")
    c.modulation.kind = ModulationKind::Bpsk;
  else
    throw std::invalid_argument("demod mode must be 'am' or 'bpsk'");

  const OperatingPoint op = operating_point(cfg);
  const double drive_field = op.omega_work * kSqrt3 / cfg.ensemble.gamma;

  double duration = c.run.duration;
  if (c.modulation.kind == ModulationKind::Bpsk)
    duration = static_cast<double>(c.modulation.bitstream.size()) /
               c.modulation.bit_rate;

  const auto omega_of_t =
      synthesize_omega(c.modulation, drive_field, c.ensemble.gamma);
  const TimeSeries clean =
      render_time_series(omega_of_t, c.ensemble, c.sequence, c.hyperfine,
                         duration, c.run.seed, c.run.n_samples);
  const TimeSeries noisy = noisy_pipeline(clean, c);

  std::cout << "config_hash = " << config_hash(c) << "\n";
  if (c.modulation.kind == ModulationKind::AmSine) {
    const double recovered =
        demod_am(noisy, c.modulation.mod_frequency, op.slope, c.ensemble.gamma);
    const double injected =
        0.5 * c.modulation.signal_amplitude * c.modulation.depth;
    std::cout << "injected_tone_t = " << num(injected) << "\n"
              << "recovered_tone_t = " << num(recovered) << "\n"
              << "relative_error = "
              << num(injected > 0.0 ? (recovered - injected) / injected : 0.0)
              << "\n";
    return 0;
  }

  // bit levels from the noiseless ensemble response at the two phases
  auto level_for = [&](int bit) {
    ModulationSpec s = c.modulation;
    s.bitstream = {bit};
    const auto f = synthesize_omega(s, drive_field, c.ensemble.gamma);
    const TimeSeries probe =
        render_time_series(f, c.ensemble, c.sequence, c.hyperfine,
                           2.0 / c.sequence.data_rate, c.run.seed,
                           c.run.n_samples);
    return probe.samples.front();
  };
  BpskCalibration cal;
  cal.level_zero = level_for(0);
  cal.level_one = level_for(1);
  const BpskResult res =
      demod_bpsk(noisy, c.modulation.bit_rate, cal, &c.modulation.bitstream);

  std::ofstream bits(out_path(c, "bits.txt"), std::ios::binary);
  for (int b : res.bits) bits << b;
  bits << "\n";
  std::cout << "bits_sent = " << c.modulation.bitstream.size() << "\n"
            << "bits_decoded = " << res.bits.size() << "\n"
            << "bit_errors = " << res.errors << "\n"
            << "ber = " << num(res.ber) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed Rabi NV-ensemble microwave magnetometer simulator"};
  app.require_subcommand(1);

  std::string config_path;
  if (const char* env = std::getenv("NVRABI_CONFIG")) config_path = env;
  app.add_option("-c,--config", config_path,
                 "Config file (default: $NVRABI_CONFIG)");

  double omega_hz = -1.0, tau_max = -1.0, duration = -1.0;
  std::string protocol, mode = "am", output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, with_signal = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output-dir", output_dir, "Output directory override");
    sub->add_option("--seed", seed, "Master seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  auto* trace = app.add_subcommand("rabi-trace",
                                   "Subtracted Rabi traces and decay fits");
  trace->add_option("--omega", omega_hz, "Nominal Rabi frequency, Hz");
  trace->add_option("--tau-max", tau_max, "Longest pulse duration, s");
  trace->add_option("--protocol", protocol, "on-off | pi-pulse");
  add_common(trace);

  auto* charac = app.add_subcommand("characterize",
                                    "C(Omega), T2rho(Omega) sweep table");
  add_common(charac);

  auto* opt = app.add_subcommand("optimize",
                                 "Figure-of-merit sweep and slope scan");
  add_common(opt);

  auto* sense = app.add_subcommand("sense",
                                   "Time series, ASD, sensitivity report");
  sense->add_option("--duration", duration, "Record length, s");
  sense->add_flag("--with-signal", with_signal,
                  "Apply the configured modulation");
  add_common(sense);

  auto* demod = app.add_subcommand("demod", "AM tone or BPSK recovery");
  demod->add_option("--mode", mode, "am | bpsk");
  demod->add_option("--duration", duration, "Record length, s (AM)");
  add_common(demod);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg =
        config_path.empty() ? default_config() : load_config(config_path);
    if (omega_hz >= 0.0) cfg.run.omega = kTwoPi * omega_hz;
    if (tau_max >= 0.0) cfg.run.tau_max = tau_max;
    if (duration >= 0.0) cfg.run.duration = duration;
    if (!output_dir.empty()) cfg.run.output_dir = output_dir;
    if (seed_set) {
      cfg.run.seed = seed;
      cfg.noise.seed = seed;
    }
    if (!protocol.empty()) {
      if (protocol == "on-off") cfg.sequence.protocol = Protocol::OnOff;
      else if (protocol == "pi-pulse") cfg.sequence.protocol = Protocol::PiPulse;
      else throw std::invalid_argument("protocol must be 'on-off' or 'pi-pulse'");
    }
    cfg.validate();

    if (trace->parsed()) return cmd_rabi_trace(cfg);
    if (charac->parsed()) return cmd_characterize(cfg);
    if (opt->parsed()) return cmd_optimize(cfg);
    if (sense->parsed()) return cmd_sense(cfg, with_signal);
    if (demod->parsed()) return cmd_demod(cfg, mode);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}
