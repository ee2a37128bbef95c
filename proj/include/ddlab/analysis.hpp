#pragma once

// Decay-time extraction, tau sweeps and the CDD order / optimal-delay fit.

#include <memory>
#include <string>
#include <vector>

#include "ddlab/engine.hpp"

namespace ddlab {

enum class DecayMethod { OneOverE, ExpFit };

const char* decay_method_name(DecayMethod m);
DecayMethod parse_decay_method(const std::string& s);

struct DecaySummary {
  std::string label;
  Axis axis = Axis::X;
  double tau = 0.0;
  double tau_c = 0.0;
  bool reached = false;
  double decay_time = 0.0;  // us; valid when reached
  DecayMethod method = DecayMethod::OneOverE;
  double pulses_per_unit_time = 0.0;
  double end_value = 0.0;   // envelope at the last sample
};

// Monotone upper envelope of |s|: knots at samples not exceeded by any later
// sample, plus the last sample, joined linearly. Needs >= 4 points.
SurvivalTrace envelope(const SurvivalTrace& trace);

// Applies `envelope` first. exp_fit uses log-envelope samples above 0.02.
DecaySummary decay_time(const SurvivalTrace& trace, DecayMethod method = DecayMethod::OneOverE);

struct SweepSpec {
  Family family = Family::CPMG;
  int order = 1;  // CDD order or UDD pulse count
  std::vector<double> tau_grid;  // us
  double tau_p = 0.0;
  double time_budget = 0.0;  // us, per point
  bool fair = false;  // common pulse rate 1/(tau + tau_p) across families
  std::shared_ptr<const SpinBathModel> model;
  ErrorModel errors;
  Axis axis = Axis::X;
  int n_realizations = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  DecayMethod method = DecayMethod::OneOverE;
};

struct SweepPoint {
  double tau_grid = 0.0;  // requested grid value
  double tau = 0.0;       // delay used by the family
  double tau_c = 0.0;
  int n_cycles = 0;
  bool ok = false;
  std::string error;
  DecaySummary summary;     // selected method
  DecaySummary cross_check; // the other method
  double end_stderr = 0.0;  // standard error of s at the last sample
};

struct SweepResult {
  std::string label;
  std::vector<SweepPoint> points;
  bool has_opt = false;
  std::size_t opt_index = 0;
  double tau_opt = 0.0;
  bool interior = false;
  // The optimum is clearly better than each grid endpoint it is not.
  bool resolved = false;
};

// A reached decay time longer by > 1%, an unreached decay against a reached
// one, or a larger end-of-budget envelope by more than 3 standard errors
// plus 1e-3.
bool clearly_better(const SweepPoint& a, const SweepPoint& b);

std::string sequence_label(Family family, int order);

// Timeline for one sweep point; `fair` picks tau from the common pulse rate.
// The cycle count fills `time_budget` unless `cycles` > 0. Non-fair UDD_N
// uses tau_c = (N+1) tau + N tau_p.
Timeline sweep_timeline(Family family, int order, double tau_grid, double tau_p, bool fair, double time_budget,
                        int cycles = 0);

// Points that fail are recorded with ok = false; the sweep continues.
// Ranking: not-reached points beat reached ones and are ordered by the
// envelope value left at the end of the common time budget.
SweepResult sweep_tau(const SweepSpec& spec);

struct OrderFit {
  double c = 0.0, c_sd = 0.0;
  double b = 0.0, b_sd = 0.0;
  std::vector<std::pair<double, double>> points;  // (n, tau_opt / tau_B)
};

// Least squares of n = c + b ln(tau_opt / tau_B).
OrderFit fit_order_relation(const std::vector<std::pair<double, double>>& points, double tau_b);

inline constexpr double kPaperOrderC = 0.9, kPaperOrderCSd = 0.2;
inline constexpr double kPaperOrderB = -0.9, kPaperOrderBSd = 0.1;

}  // namespace ddlab
