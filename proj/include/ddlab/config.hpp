#pragma once

// Experiment configuration: INI-style sections of `key = value` lines with
// units in the key names (_us, _khz, _rad). `#` and `;` start comments.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddlab/analysis.hpp"
#include "ddlab/model.hpp"

namespace ddlab {

// A sequence choice such as "cpmg", "cdd3" or "udd4".
struct SequenceChoice {
  Family family = Family::CPMG;
  int order = 1;
};

SequenceChoice parse_sequence_choice(const std::string& s);
std::string sequence_choice_name(const SequenceChoice& c);

struct ExperimentConfig {
  // [bath]
  CouplingSpec coupling;
  Eigen::VectorXd b_khz;
  Eigen::MatrixXd d_khz;

  // [pulses]
  double rf_khz = 48.0;
  std::optional<double> tau_p_us;
  bool delta = false;

  // [errors]
  ErrorModel errors;

  // [sequence]
  SequenceChoice sequence;
  std::optional<double> tau_us;
  std::vector<double> tau_grid_us;
  int cycles = 0;
  double time_budget_us = 0.0;
  std::vector<SequenceChoice> families;

  // [run]
  Axis axis = Axis::X;
  int realizations = 1;
  std::uint64_t seed = 0;
  RecordMode record = RecordMode::CycleBoundaries;
  int threads = 1;
  DecayMethod method = DecayMethod::OneOverE;

  // [output]
  std::string directory = ".";
  std::string prefix = "ddlab";
  bool write_csv = true;
  bool write_json = true;

  // [corr]
  double t_max_us = 600.0;
  double t_step_us = 2.0;

  // [fit]
  std::vector<std::pair<double, double>> fit_points;  // (n, tau_opt us)
  std::optional<double> tau_b_us;
  std::vector<int> fit_orders{1, 2, 3};

  // [verify]
  double verify_tau_us = 10.0;
  double verify_flip_error = 0.05;

  // "section.key" -> raw value, as read
  std::map<std::string, std::string> entries;
};

ExperimentConfig default_config();

// Throws ConfigError with the offending line.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

// Sorted `section.key = value` lines of the explicit entries.
std::string canonical_config(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::shared_ptr<SpinBathModel> build_model(const ExperimentConfig& cfg);
std::uint64_t couplings_hash(const SpinBathModel& model);

// 0 for delta pulses.
double pulse_duration_us(const ExperimentConfig& cfg);

}  // namespace ddlab
