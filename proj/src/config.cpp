#include "nvrabi/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nvrabi/units.hpp"

namespace nvrabi {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw std::invalid_argument("config: bad number for " + key + ": '" +
                                value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  std::uint64_t v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0')
    throw std::invalid_argument("config: bad integer for " + key + ": '" +
                                value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" +
                              value + "'");
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunParams::validate() const {
  if (omega <= 0.0) throw std::invalid_argument("run.omega must be > 0");
  if (tau_max <= 0.0) throw std::invalid_argument("run.tau_max must be > 0");
  if (tau_step <= 0.0 || tau_step >= tau_max)
    throw std::invalid_argument("run.tau_step must be in (0, tau_max)");
  if (n_samples < 1) throw std::invalid_argument("run.n_samples must be >= 1");
  if (duration <= 0.0) throw std::invalid_argument("run.duration must be > 0");
  if (highpass_cutoff < 0.0)
    throw std::invalid_argument("run.highpass_cutoff must be >= 0");
  if (omega_min <= 0.0 || omega_max < omega_min)
    throw std::invalid_argument("run.omega_min/omega_max must satisfy 0 < min <= max");
  if (omega_points < 1)
    throw std::invalid_argument("run.omega_points must be >= 1");
  if (output_dir.empty())
    throw std::invalid_argument("run.output_dir must be non-empty");
}

void RunConfig::validate() const {
  ensemble.validate();
  sequence.validate();
  if (hyperfine.modulation_depth < 0.0 || hyperfine.modulation_depth > 1.0)
    throw std::invalid_argument("hyperfine.modulation_depth must be in [0, 1]");
  if (hyperfine.beat_frequency < 0.0)
    throw std::invalid_argument("hyperfine.beat_frequency must be >= 0");
  noise.validate();
  modulation.validate();
  run.validate();
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.hyperfine.beat_frequency = 40.14e3;
  cfg.hyperfine.modulation_depth = 0.3;
  cfg.hyperfine.hf_detuning = kTwoPi * 3e6;
  // calibrated so the default zero-signal pipeline lands near 3.4 pT/rtHz;
  // a modeling calibration, not an instrument measurement
  cfg.noise.laser_white_asd = 2.25e-7;
  cfg.noise.laser_flicker_corner = 50.0;
  cfg.noise.cancellation_residual = 1.0;
  cfg.noise.seed = 1;
  cfg.modulation.kind = ModulationKind::AmSine;
  cfg.modulation.signal_amplitude = 4.4e-9;
  cfg.modulation.mod_frequency = 25.0;
  cfg.modulation.depth = 1.0;
  cfg.modulation.phase_deviation = kTwoPi / 8.0;  // pi/4
  cfg.modulation.bitstream = {1, 0, 1, 1, 0};
  cfg.modulation.bit_rate = 50.0;
  return cfg;
}

std::string protocol_name(Protocol p) {
  return p == Protocol::PiPulse ? "pi-pulse" : "on-off";
}

std::string modulation_name(ModulationKind k) {
  switch (k) {
    case ModulationKind::AmSine: return "am";
    case ModulationKind::PmSquare: return "pm";
    case ModulationKind::Bpsk: return "bpsk";
  }
  return "am";
}

namespace {

Protocol parse_protocol(const std::string& value) {
  if (value == "pi-pulse") return Protocol::PiPulse;
  if (value == "on-off") return Protocol::OnOff;
  throw std::invalid_argument(
      "config: sequence.protocol must be 'pi-pulse' or 'on-off', got '" +
      value + "'");
}

ModulationKind parse_kind(const std::string& value) {
  if (value == "am") return ModulationKind::AmSine;
  if (value == "pm") return ModulationKind::PmSquare;
  if (value == "bpsk") return ModulationKind::Bpsk;
  throw std::invalid_argument(
      "config: modulation.kind must be 'am', 'pm' or 'bpsk', got '" + value +
      "'");
}

std::vector<int> parse_bits(const std::string& key, const std::string& value) {
  std::vector<int> bits;
  bits.reserve(value.size());
  for (char c : value) {
    if (c == '0')
      bits.push_back(0);
    else if (c == '1')
      bits.push_back(1);
    else
      throw std::invalid_argument("config: " + key +
                                  " must be a string of 0/1 characters");
  }
  if (bits.empty())
    throw std::invalid_argument("config: " + key + " must be non-empty");
  return bits;
}

void apply_key(RunConfig& cfg, const std::string& section,
               const std::string& key, const std::string& value) {
  const std::string path = section + "." + key;
  if (section == "ensemble") {
    auto& e = cfg.ensemble;
    if (key == "gamma") e.gamma = parse_double(path, value);
    else if (key == "t2_star") e.t2_star = parse_double(path, value);
    else if (key == "mw_inhomogeneity") e.mw_inhomogeneity = parse_double(path, value);
    else if (key == "nv_count") e.nv_count = parse_double(path, value);
    else if (key == "photons_per_nv") e.photons_per_nv = parse_double(path, value);
    else if (key == "contrast_ceiling") e.contrast_ceiling = parse_double(path, value);
    else if (key == "stretch") e.stretch = parse_double(path, value);
    else if (key == "projection") e.projection = parse_double(path, value);
    else if (key == "bias_field") e.bias_field = parse_double(path, value);
    else throw std::invalid_argument("config: unknown key " + path);
  } else if (section == "sequence") {
    auto& s = cfg.sequence;
    if (key == "mw_duration") s.mw_duration = parse_double(path, value);
    else if (key == "overhead") s.overhead = parse_double(path, value);
    else if (key == "protocol") s.protocol = parse_protocol(value);
    else if (key == "sequence_rate") s.sequence_rate = parse_double(path, value);
    else if (key == "data_rate") s.data_rate = parse_double(path, value);
    else if (key == "pi_fidelity") s.pi_fidelity = parse_double(path, value);
    else throw std::invalid_argument("config: unknown key " + path);
  } else if (section == "hyperfine") {
    auto& h = cfg.hyperfine;
    if (key == "beat_frequency") h.beat_frequency = parse_double(path, value);
    else if (key == "modulation_depth") h.modulation_depth = parse_double(path, value);
    else if (key == "hf_detuning") h.hf_detuning = parse_double(path, value);
    else throw std::invalid_argument("config: unknown key " + path);
  } else if (section == "noise") {
    auto& n = cfg.noise;
    if (key == "shot_noise_enabled") n.shot_noise_enabled = parse_bool(path, value);
    else if (key == "laser_white_asd") n.laser_white_asd = parse_double(path, value);
    else if (key == "laser_flicker_corner") n.laser_flicker_corner = parse_double(path, value);
    else if (key == "cancellation_residual") n.cancellation_residual = parse_double(path, value);
    else if (key == "seed") n.seed = parse_u64(path, value);
    else throw std::invalid_argument("config: unknown key " + path);
  } else if (section == "modulation") {
    auto& m = cfg.modulation;
    if (key == "kind") m.kind = parse_kind(value);
    else if (key == "signal_amplitude") m.signal_amplitude = parse_double(path, value);
    else if (key == "mod_frequency") m.mod_frequency = parse_double(path, value);
    else if (key == "depth") m.depth = parse_double(path, value);
    else if (key == "phase_deviation") m.phase_deviation = parse_double(path, value);
    else if (key == "bitstream") m.bitstream = parse_bits(path, value);
    else if (key == "bit_rate") m.bit_rate = parse_double(path, value);
    else throw std::invalid_argument("config: unknown key " + path);
  } else if (section == "run") {
    auto& r = cfg.run;
    if (key == "omega") r.omega = parse_double(path, value);
    else if (key == "tau_max") r.tau_max = parse_double(path, value);
    else if (key == "tau_step") r.tau_step = parse_double(path, value);
    else if (key == "n_samples") r.n_samples = static_cast<std::size_t>(parse_u64(path, value));
    else if (key == "duration") r.duration = parse_double(path, value);
    else if (key == "highpass_cutoff") r.highpass_cutoff = parse_double(path, value);
    else if (key == "omega_min") r.omega_min = parse_double(path, value);
    else if (key == "omega_max") r.omega_max = parse_double(path, value);
    else if (key == "omega_points") r.omega_points = static_cast<std::size_t>(parse_u64(path, value));
    else if (key == "output_dir") r.output_dir = value;
    else if (key == "seed") r.seed = parse_u64(path, value);
    else throw std::invalid_argument("config: unknown key " + path);
  } else {
    throw std::invalid_argument("config: unknown section [" + section + "]");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = default_config();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value' at line " +
                                  std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config: key '" + key +
                                  "' outside any [section]");
    apply_key(cfg, section, key, value);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto& e = cfg.ensemble;
  out << "[ensemble]\n"
      << "gamma = " << fmt_double(e.gamma) << "\n"
      << "t2_star = " << fmt_double(e.t2_star) << "\n"
      << "mw_inhomogeneity = " << fmt_double(e.mw_inhomogeneity) << "\n"
      << "nv_count = " << fmt_double(e.nv_count) << "\n"
      << "photons_per_nv = " << fmt_double(e.photons_per_nv) << "\n"
      << "contrast_ceiling = " << fmt_double(e.contrast_ceiling) << "\n"
      << "stretch = " << fmt_double(e.stretch) << "\n"
      << "projection = " << fmt_double(e.projection) << "\n"
      << "bias_field = " << fmt_double(e.bias_field) << "\n";
  const auto& s = cfg.sequence;
  out << "[sequence]\n"
      << "mw_duration = " << fmt_double(s.mw_duration) << "\n"
      << "overhead = " << fmt_double(s.overhead) << "\n"
      << "protocol = " << protocol_name(s.protocol) << "\n"
      << "sequence_rate = " << fmt_double(s.sequence_rate) << "\n"
      << "data_rate = " << fmt_double(s.data_rate) << "\n"
      << "pi_fidelity = " << fmt_double(s.pi_fidelity) << "\n";
  const auto& h = cfg.hyperfine;
  out << "[hyperfine]\n"
      << "beat_frequency = " << fmt_double(h.beat_frequency) << "\n"
      << "modulation_depth = " << fmt_double(h.modulation_depth) << "\n"
      << "hf_detuning = " << fmt_double(h.hf_detuning) << "\n";
  const auto& n = cfg.noise;
  out << "[noise]\n"
      << "shot_noise_enabled = " << (n.shot_noise_enabled ? "true" : "false") << "\n"
      << "laser_white_asd = " << fmt_double(n.laser_white_asd) << "\n"
      << "laser_flicker_corner = " << fmt_double(n.laser_flicker_corner) << "\n"
      << "cancellation_residual = " << fmt_double(n.cancellation_residual) << "\n"
      << "seed = " << n.seed << "\n";
  const auto& m = cfg.modulation;
  out << "[modulation]\n"
      << "kind = " << modulation_name(m.kind) << "\n"
      << "signal_amplitude = " << fmt_double(m.signal_amplitude) << "\n"
      << "mod_frequency = " << fmt_double(m.mod_frequency) << "\n"
      << "depth = " << fmt_double(m.depth) << "\n"
      << "phase_deviation = " << fmt_double(m.phase_deviation) << "\n"
      << "bitstream = ";
  for (int b : m.bitstream) out << b;
  out << "\n"
      << "bit_rate = " << fmt_double(m.bit_rate) << "\n";
  const auto& r = cfg.run;
  out << "[run]\n"
      << "omega = " << fmt_double(r.omega) << "\n"
      << "tau_max = " << fmt_double(r.tau_max) << "\n"
      << "tau_step = " << fmt_double(r.tau_step) << "\n"
      << "n_samples = " << r.n_samples << "\n"
      << "duration = " << fmt_double(r.duration) << "\n"
      << "highpass_cutoff = " << fmt_double(r.highpass_cutoff) << "\n"
      << "omega_min = " << fmt_double(r.omega_min) << "\n"
      << "omega_max = " << fmt_double(r.omega_max) << "\n"
      << "omega_points = " << r.omega_points << "\n"
      << "output_dir = " << r.output_dir << "\n"
      << "seed = " << r.seed << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace nvrabi
