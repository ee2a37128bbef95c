#pragma once

// Compilation of decoupling sequence families into explicit pulse timelines.
//
// Sequence operators are read right-to-left as time order: the PDD cycle
// Y f X f Y f X f executes f, X, f, Y, f, X, f, Y. All pulses are pi pulses;
// `tau_p` = 0 selects delta pulses. Times are in microseconds.

#include <iosfwd>
#include <string>
#include <vector>

#include "ddlab/pulsegen.hpp"

namespace ddlab {

struct PulseEvent {
  double start = 0.0;
  PulseAxis axis = PulseAxis::Y;
  double angle = 0.0;
  double duration = 0.0;

  double end() const { return start + duration; }
  bool operator==(const PulseEvent&) const = default;
};

enum class Family { Free, Hahn, CP, CPMG, CPMG2, PDD, CDD, UDD };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct Timeline {
  std::vector<PulseEvent> events;  // all cycles, sorted by start
  double cycle_time = 0.0;
  int n_cycles = 1;
  std::string label;
  int pulses_per_cycle = 0;
  int free_periods_per_cycle = 0;

  double total_time() const { return cycle_time * n_cycles; }
  // Events of the first cycle.
  std::vector<PulseEvent> cycle_events() const;
};

// Free evolution sampled every `interval`: no pulses, M empty cycles.
Timeline compile_free(double interval, int n_cycles);

Timeline compile_hahn(double tau, double tau_p, int n_cycles = 1);

enum class CpmgVariant { CP, CPMG, CPMG2 };
Timeline compile_cpmg(double tau, double tau_p, int n_cycles, CpmgVariant variant);

Timeline compile_pdd(double tau, double tau_p, int n_cycles);

inline constexpr int kMaxCddOrder = 5;
Timeline compile_cdd(int order, double tau, double tau_p, int n_cycles);

// Pulse i starts at tau_c sin^2(pi i / (2(N+1))), all about +y.
Timeline compile_udd(int n_pulses, double cycle_time, double tau_p, int n_cycles);

// Closed-form CDD bookkeeping: N_n = 4 N_{n-1} + 4, free periods 4^n.
int cdd_pulse_count(int order);
int cdd_free_period_count(int order);

struct CycleStats {
  double cycle_time = 0.0;
  int pulses_per_cycle = 0;
  double avg_pulses_per_unit_time = 0.0;
  double avg_delay = 0.0;
};

CycleStats cycle_stats(const Timeline& tl);

// Empty iff every timeline invariant holds.
std::vector<std::string> validate_timeline(const Timeline& tl);

// Line format: header comments then `t_start axis angle duration` per event.
void write_timeline(std::ostream& os, const Timeline& tl);
Timeline read_timeline(std::istream& is);

}  // namespace ddlab
