#include "ddlab/sequences.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ddlab/errors.hpp"

namespace ddlab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ContractError(std::string(what) + " must be positive");
}

void require_pulse_width(double tau_p) {
  if (!(tau_p >= 0.0) || !std::isfinite(tau_p)) throw ContractError("pulse duration must be >= 0");
}

void require_cycles(int m) {
  if (m < 1) throw ContractError("number of cycles must be >= 1");
}

// Replicates one cycle of events M times.
Timeline replicate(std::vector<PulseEvent> cycle, double cycle_time, int n_cycles, std::string label,
                   int free_periods) {
  Timeline tl;
  tl.cycle_time = cycle_time;
  tl.n_cycles = n_cycles;
  tl.label = std::move(label);
  tl.pulses_per_cycle = static_cast<int>(cycle.size());
  tl.free_periods_per_cycle = free_periods;
  tl.events.reserve(cycle.size() * static_cast<std::size_t>(n_cycles));
  for (int m = 0; m < n_cycles; ++m) {
    const double offset = m * cycle_time;
    for (PulseEvent e : cycle) {
      e.start += offset;
      tl.events.push_back(e);
    }
  }
  return tl;
}

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", t);
  return buf;
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Free: return "free";
    case Family::Hahn: return "hahn";
    case Family::CP: return "cp";
    case Family::CPMG: return "cpmg";
    case Family::CPMG2: return "cpmg2";
    case Family::PDD: return "pdd";
    case Family::CDD: return "cdd";
    case Family::UDD: return "udd";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  std::string k = s;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (k == "free" || k == "fid") return Family::Free;
  if (k == "hahn") return Family::Hahn;
  if (k == "cp") return Family::CP;
  if (k == "cpmg") return Family::CPMG;
  if (k == "cpmg2" || k == "cpmg-2") return Family::CPMG2;
  if (k == "pdd" || k == "xy4" || k == "xy-4") return Family::PDD;
  if (k == "cdd") return Family::CDD;
  if (k == "udd") return Family::UDD;
  throw ContractError("unknown sequence family '" + s + "'");
}

std::vector<PulseEvent> Timeline::cycle_events() const {
  const auto n = std::min<std::size_t>(events.size(), static_cast<std::size_t>(pulses_per_cycle));
  return {events.begin(), events.begin() + static_cast<std::ptrdiff_t>(n)};
}

Timeline compile_free(double interval, int n_cycles) {
  require_positive(interval, "sampling interval");
  require_cycles(n_cycles);
  return replicate({}, interval, n_cycles, "FID", 1);
}

Timeline compile_hahn(double tau, double tau_p, int n_cycles) {
  require_positive(tau, "tau");
  require_pulse_width(tau_p);
  require_cycles(n_cycles);
  return replicate({{tau, PulseAxis::Y, kPi, tau_p}}, 2.0 * tau + tau_p, n_cycles, "Hahn", 2);
}

Timeline compile_cpmg(double tau, double tau_p, int n_cycles, CpmgVariant variant) {
  require_positive(tau, "tau");
  require_pulse_width(tau_p);
  require_cycles(n_cycles);
  PulseAxis first = PulseAxis::Y, second = PulseAxis::Y;
  std::string label = "CPMG";
  switch (variant) {
    case CpmgVariant::CP:
      first = second = PulseAxis::X;
      label = "CP";
      break;
    case CpmgVariant::CPMG: break;
    case CpmgVariant::CPMG2:
      second = PulseAxis::MinusY;
      label = "CPMG2";
      break;
  }
  // f_{tau/2} P f_tau P f_{tau/2}; the two half delays join across cycles.
  std::vector<PulseEvent> cycle = {{0.5 * tau, first, kPi, tau_p}, {1.5 * tau + tau_p, second, kPi, tau_p}};
  return replicate(std::move(cycle), 2.0 * tau + 2.0 * tau_p, n_cycles, label, 2);
}

int cdd_pulse_count(int order) { return order <= 0 ? 0 : 4 * cdd_pulse_count(order - 1) + 4; }

int cdd_free_period_count(int order) { return order <= 0 ? 1 : 4 * cdd_free_period_count(order - 1); }

namespace {

// Time-ordered token stream; `free` marks a delay of length tau.
struct Token {
  bool free;
  PulseAxis axis;
};

void expand_cdd(int order, std::vector<Token>& out) {
  if (order == 0) {
    out.push_back({true, PulseAxis::X});
    return;
  }
  // C_n = Y C_{n-1} X C_{n-1} Y C_{n-1} X C_{n-1}, executed right to left.
  const PulseAxis pulses[4] = {PulseAxis::X, PulseAxis::Y, PulseAxis::X, PulseAxis::Y};
  for (PulseAxis p : pulses) {
    expand_cdd(order - 1, out);
    out.push_back({false, p});
  }
}

}  // namespace

Timeline compile_cdd(int order, double tau, double tau_p, int n_cycles) {
  if (order < 1 || order > kMaxCddOrder) {
    throw ContractError("CDD order must lie in [1, " + std::to_string(kMaxCddOrder) + "]");
  }
  require_positive(tau, "tau");
  require_pulse_width(tau_p);
  require_cycles(n_cycles);
  std::vector<Token> tokens;
  expand_cdd(order, tokens);
  std::vector<PulseEvent> cycle;
  double t = 0.0;
  int free_periods = 0;
  for (const Token& tok : tokens) {
    if (tok.free) {
      t += tau;
      ++free_periods;
    } else {
      cycle.push_back({t, tok.axis, kPi, tau_p});
      t += tau_p;
    }
  }
  const double cycle_time = cdd_free_period_count(order) * tau + cdd_pulse_count(order) * tau_p;
  if (static_cast<int>(cycle.size()) != cdd_pulse_count(order) || free_periods != cdd_free_period_count(order)) {
    throw std::logic_error("CDD expansion disagrees with closed-form counts");
  }
  return replicate(std::move(cycle), cycle_time, n_cycles, order == 1 ? "PDD" : "CDD" + std::to_string(order),
                   free_periods);
}

Timeline compile_pdd(double tau, double tau_p, int n_cycles) { return compile_cdd(1, tau, tau_p, n_cycles); }

Timeline compile_udd(int n_pulses, double cycle_time, double tau_p, int n_cycles) {
  if (n_pulses < 1) throw ContractError("UDD needs at least one pulse");
  require_positive(cycle_time, "cycle time");
  require_pulse_width(tau_p);
  require_cycles(n_cycles);
  if (!(cycle_time > n_pulses * tau_p)) throw ContractError("UDD cycle time must exceed N * tau_p");
  std::vector<PulseEvent> cycle;
  for (int i = 1; i <= n_pulses; ++i) {
    const double s = std::sin(kPi * i / (2.0 * (n_pulses + 1)));
    cycle.push_back({cycle_time * s * s, PulseAxis::Y, kPi, tau_p});
  }
  for (int i = 1; i < n_pulses; ++i) {
    if (cycle[i].start < cycle[i - 1].end()) {
      throw ContractError("UDD pulses " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " overlap: cycle time too short for N and tau_p");
    }
  }
  if (cycle.back().end() > cycle_time) throw ContractError("UDD last pulse runs past the cycle end");
  return replicate(std::move(cycle), cycle_time, n_cycles, "UDD" + std::to_string(n_pulses), n_pulses + 1);
}

CycleStats cycle_stats(const Timeline& tl) {
  CycleStats st;
  st.cycle_time = tl.cycle_time;
  st.pulses_per_cycle = tl.pulses_per_cycle;
  st.avg_pulses_per_unit_time = tl.cycle_time > 0.0 ? tl.pulses_per_cycle / tl.cycle_time : 0.0;
  double pulse_time = 0.0;
  for (const auto& e : tl.cycle_events()) pulse_time += e.duration;
  const int periods = std::max(1, tl.free_periods_per_cycle);
  st.avg_delay = (tl.cycle_time - pulse_time) / periods;
  return st;
}

std::vector<std::string> validate_timeline(const Timeline& tl) {
  std::vector<std::string> out;
  if (tl.n_cycles < 1) out.push_back("n_cycles < 1");
  if (!(tl.cycle_time > 0.0)) out.push_back("cycle time must be positive");
  if (!out.empty()) return out;
  const double eps = 1e-9 * std::max(1.0, tl.total_time());
  const auto expected = static_cast<std::size_t>(tl.pulses_per_cycle) * static_cast<std::size_t>(tl.n_cycles);
  if (tl.events.size() != expected) {
    out.push_back("event count " + std::to_string(tl.events.size()) + " != pulses_per_cycle * n_cycles = " +
                  std::to_string(expected));
  }
  for (std::size_t k = 0; k < tl.events.size(); ++k) {
    const PulseEvent& e = tl.events[k];
    const std::string name = "event " + std::to_string(k) + " (t=" + fmt_time(e.start) + ")";
    if (!std::isfinite(e.start) || e.start < 0.0) out.push_back(name + " starts before 0");
    if (!(e.duration >= 0.0)) out.push_back(name + " has negative duration");
    if (k > 0) {
      const PulseEvent& p = tl.events[k - 1];
      if (e.start < p.start) {
        out.push_back("event " + std::to_string(k - 1) + " (t=" + fmt_time(p.start) + ") and " + name +
                      " are out of order");
      } else if (e.start < p.end() - eps) {
        out.push_back("event " + std::to_string(k - 1) + " (t=" + fmt_time(p.start) + ") overlaps " + name);
      }
    }
    if (tl.pulses_per_cycle > 0) {
      const auto cycle = static_cast<double>(k / static_cast<std::size_t>(tl.pulses_per_cycle));
      if (e.start < cycle * tl.cycle_time - eps || e.end() > (cycle + 1.0) * tl.cycle_time + eps) {
        out.push_back(name + " lies outside its cycle [" + fmt_time(cycle * tl.cycle_time) + ", " +
                      fmt_time((cycle + 1.0) * tl.cycle_time) + "]");
      }
    }
  }
  if (!tl.events.empty() && tl.events.back().end() > tl.total_time() + eps) {
    out.push_back("event " + std::to_string(tl.events.size() - 1) + " ends at " + fmt_time(tl.events.back().end()) +
                  " after the timeline end " + fmt_time(tl.total_time()));
  }
  return out;
}

void write_timeline(std::ostream& os, const Timeline& tl) {
  char buf[160];
  os << "# ddlab timeline\n";
  os << "# label " << tl.label << '\n';
  std::snprintf(buf, sizeof buf, "# cycle_time_us %.17g\n", tl.cycle_time);
  os << buf;
  os << "# cycles " << tl.n_cycles << '\n';
  os << "# pulses_per_cycle " << tl.pulses_per_cycle << '\n';
  os << "# free_periods_per_cycle " << tl.free_periods_per_cycle << '\n';
  os << "# t_start_us axis angle_rad duration_us\n";
  for (const auto& e : tl.events) {
    std::snprintf(buf, sizeof buf, "%.17g %s %.17g %.17g\n", e.start, pulse_axis_name(e.axis), e.angle, e.duration);
    os << buf;
  }
}

Timeline read_timeline(std::istream& is) {
  Timeline tl;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "label") {
        ls >> tl.label;
      } else if (key == "cycle_time_us") {
        ls >> tl.cycle_time;
      } else if (key == "cycles") {
        ls >> tl.n_cycles;
      } else if (key == "pulses_per_cycle") {
        ls >> tl.pulses_per_cycle;
      } else if (key == "free_periods_per_cycle") {
        ls >> tl.free_periods_per_cycle;
      }
      continue;
    }
    PulseEvent e;
    std::string axis;
    if (!(ls >> e.start >> axis >> e.angle >> e.duration)) {
      throw ConfigError("malformed timeline event", lineno);
    }
    e.axis = parse_pulse_axis(axis);
    tl.events.push_back(e);
  }
  return tl;
}

}  // namespace ddlab
