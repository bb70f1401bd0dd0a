#pragma once

#include <cstdint>
#include <string>

#include "nvrabi/comms.hpp"
#include "nvrabi/ensemble.hpp"
#include "nvrabi/noise.hpp"
#include "nvrabi/sequence.hpp"
#include "nvrabi/spin_core.hpp"

namespace nvrabi {

// Run-level knobs that do not belong to a physics module.
struct RunParams {
  double omega = kTwoPi * 42.8e3;  // rad/s, nominal operating drive
  double tau_max = 150e-6;         // s
  double tau_step = 0.5e-6;        // s
  std::size_t n_samples = 20000;   // Monte Carlo ensemble draws
  double duration = 1.0;           // s, sense record length
  double highpass_cutoff = 100.0;  // Hz
  double omega_min = kTwoPi * 10e3;   // rad/s, characterization sweep
  double omega_max = kTwoPi * 200e3;  // rad/s
  std::size_t omega_points = 7;
  std::string output_dir = ".";
  std::uint64_t seed = 1;

  void validate() const;
};

struct RunConfig {
  EnsembleParams ensemble;
  SequenceParams sequence;
  HyperfineModel hyperfine;
  NoiseConfig noise;
  ModulationSpec modulation;
  RunParams run;

  void validate() const;  // every nested validate; errors name section.field
};

RunConfig default_config();

// key = value sections ([ensemble], [sequence], [hyperfine], [noise],
// [modulation], [run]); '#' comments; unknown sections or keys are
// validation errors. Unset keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text form (stable key order, max-precision numbers); parsing it
// back reproduces the config exactly.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a 64-bit over the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::string protocol_name(Protocol p);
std::string modulation_name(ModulationKind k);

}  // namespace nvrabi
