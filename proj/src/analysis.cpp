#include "ddlab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ddlab/errors.hpp"

namespace ddlab {

const char* decay_method_name(DecayMethod m) { return m == DecayMethod::ExpFit ? "exp_fit" : "one_over_e"; }

DecayMethod parse_decay_method(const std::string& s) {
  if (s == "one_over_e") return DecayMethod::OneOverE;
  if (s == "exp_fit") return DecayMethod::ExpFit;
  throw ContractError("unknown decay method '" + s + "'");
}

SurvivalTrace envelope(const SurvivalTrace& trace) {
  const std::size_t n = trace.size();
  if (n < 4) throw ContractError("envelope: need at least 4 points");
  std::vector<std::size_t> knots;
  double later = -1.0;
  for (std::size_t i = n; i-- > 0;) {
    const double v = std::abs(trace.s[i]);
    if (i == n - 1 || v >= later) knots.push_back(i);
    later = std::max(later, v);
  }
  std::reverse(knots.begin(), knots.end());
  SurvivalTrace out = trace;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const std::size_t i0 = knots[k], i1 = knots[k + 1];
    const double t0 = trace.times[i0], t1 = trace.times[i1];
    const double v0 = std::abs(trace.s[i0]), v1 = std::abs(trace.s[i1]);
    for (std::size_t i = i0; i <= i1; ++i) {
      const double f = t1 > t0 ? (trace.times[i] - t0) / (t1 - t0) : 0.0;
      out.s[i] = v0 + f * (v1 - v0);
    }
  }
  // leading samples exceeded later on take the first knot value
  for (std::size_t i = 0; i < knots.front(); ++i) out.s[i] = std::abs(trace.s[knots.front()]);
  out.s[knots.back()] = std::abs(trace.s[knots.back()]);
  return out;
}

namespace {

double fit_decay(const SurvivalTrace& env, bool* ok) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env.s[i] <= 0.02) continue;
    const double x = env.times[i], y = std::log(env.s[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  *ok = false;
  if (m < 2) return 0.0;
  const double den = m * sxx - sx * sx;
  if (den <= 0.0) return 0.0;
  const double slope = (m * sxy - sx * sy) / den;
  if (!(slope < 0.0)) return 0.0;
  *ok = true;
  return -1.0 / slope;
}

}  // namespace

DecaySummary decay_time(const SurvivalTrace& trace, DecayMethod method) {
  const SurvivalTrace env = envelope(trace);
  DecaySummary out;
  out.label = trace.label;
  out.axis = trace.axis;
  out.method = method;
  out.end_value = env.s.back();
  if (method == DecayMethod::OneOverE) {
    const TauEstimate est = estimate_tau_b(env.s, env.times);
    out.reached = est.reached;
    out.decay_time = est.reached ? est.tau : 0.0;
  } else {
    bool ok = false;
    out.decay_time = fit_decay(env, &ok);
    out.reached = ok;
  }
  return out;
}

std::string sequence_label(Family family, int order) {
  switch (family) {
    case Family::Free: return "FID";
    case Family::Hahn: return "Hahn";
    case Family::CP: return "CP";
    case Family::CPMG: return "CPMG";
    case Family::CPMG2: return "CPMG2";
    case Family::PDD: return "PDD";
    case Family::CDD: return order == 1 ? "PDD" : "CDD" + std::to_string(order);
    case Family::UDD: return "UDD" + std::to_string(order);
  }
  return "?";
}

namespace {

Timeline compile_one(Family family, int order, double tau, double tau_p, int n_cycles) {
  switch (family) {
    case Family::Free: return compile_free(tau, n_cycles);
    case Family::Hahn: return compile_hahn(tau, tau_p, n_cycles);
    case Family::CP: return compile_cpmg(tau, tau_p, n_cycles, CpmgVariant::CP);
    case Family::CPMG: return compile_cpmg(tau, tau_p, n_cycles, CpmgVariant::CPMG);
    case Family::CPMG2: return compile_cpmg(tau, tau_p, n_cycles, CpmgVariant::CPMG2);
    case Family::PDD: return compile_pdd(tau, tau_p, n_cycles);
    case Family::CDD: return compile_cdd(order, tau, tau_p, n_cycles);
    case Family::UDD: return compile_udd(order, tau, tau_p, n_cycles);
  }
  throw ContractError("unknown family");
}

}  // namespace

Timeline sweep_timeline(Family family, int order, double tau_grid, double tau_p, bool fair, double time_budget,
                        int cycles) {
  if (!(tau_grid > 0.0)) throw ContractError("tau must be positive");
  // one-cycle probe for the pulse and free-period counts
  double tau = tau_grid;
  double udd_cycle = 0.0;
  if (family == Family::UDD) {
    udd_cycle = fair ? order * (tau_grid + tau_p) : (order + 1) * tau_grid + order * tau_p;
  } else if (fair && family != Family::Free) {
    const Timeline probe = compile_one(family, order, tau_grid, tau_p, 1);
    const int n = probe.pulses_per_cycle, f = probe.free_periods_per_cycle;
    tau = (n * (tau_grid + tau_p) - n * tau_p) / f;
  }
  const double arg = family == Family::UDD ? udd_cycle : tau;
  const Timeline one = compile_one(family, order, arg, tau_p, 1);
  if (cycles > 0) return compile_one(family, order, arg, tau_p, cycles);
  cycles = 1;
  if (time_budget > 0.0) cycles = std::max(1, static_cast<int>(std::floor(time_budget / one.cycle_time + 1e-9)));
  return compile_one(family, order, arg, tau_p, cycles);
}

bool clearly_better(const SweepPoint& a, const SweepPoint& b) {
  if (a.summary.reached != b.summary.reached) return !a.summary.reached;
  if (a.summary.reached) return a.summary.decay_time > 1.01 * b.summary.decay_time;
  const double noise = 3.0 * std::hypot(a.end_stderr, b.end_stderr) + 1e-3;
  return a.summary.end_value > b.summary.end_value + noise;
}

SweepResult sweep_tau(const SweepSpec& spec) {
  if (spec.tau_grid.empty()) throw ContractError("sweep_tau: empty tau grid");
  if (!spec.model) throw ContractError("sweep_tau: model is missing");
  SweepResult result;
  result.label = sequence_label(spec.family, spec.order);
  const DecayMethod other = spec.method == DecayMethod::OneOverE ? DecayMethod::ExpFit : DecayMethod::OneOverE;
  for (double tg : spec.tau_grid) {
    SweepPoint pt;
    pt.tau_grid = tg;
    try {
      const Timeline tl = sweep_timeline(spec.family, spec.order, tg, spec.tau_p, spec.fair, spec.time_budget);
      pt.tau_c = tl.cycle_time;
      pt.n_cycles = tl.n_cycles;
      pt.tau = spec.family == Family::UDD ? tl.cycle_time / (spec.order + 1) : tg;
      if (spec.fair && spec.family != Family::UDD && spec.family != Family::Free) {
        pt.tau = (tl.cycle_time - tl.pulses_per_cycle * spec.tau_p) / tl.free_periods_per_cycle;
      }
      RunSpec run;
      run.model = spec.model;
      run.timeline = tl;
      run.errors = spec.errors;
      run.initial_axis = spec.axis;
      run.n_realizations = spec.n_realizations;
      run.master_seed = spec.seed;
      run.threads = spec.threads;
      const SurvivalTrace trace = propagate(run);
      pt.summary = decay_time(trace, spec.method);
      pt.cross_check = decay_time(trace, other);
      pt.end_stderr = trace.std_error.back();
      const CycleStats st = cycle_stats(tl);
      for (DecaySummary* s : {&pt.summary, &pt.cross_check}) {
        s->tau = pt.tau;
        s->tau_c = pt.tau_c;
        s->pulses_per_unit_time = st.avg_pulses_per_unit_time;
      }
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    result.points.push_back(std::move(pt));
  }

  auto better = [](const SweepPoint& a, const SweepPoint& b) {
    if (a.summary.reached != b.summary.reached) return !a.summary.reached;
    if (a.summary.reached) return a.summary.decay_time > b.summary.decay_time;
    return a.summary.end_value > b.summary.end_value;
  };
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& p = result.points[i];
    if (!p.ok) continue;
    if (!result.has_opt || better(p, result.points[result.opt_index])) {
      result.has_opt = true;
      result.opt_index = i;
    }
  }
  if (result.has_opt) {
    const SweepPoint& best = result.points[result.opt_index];
    result.tau_opt = best.tau;
    result.interior = result.opt_index > 0 && result.opt_index + 1 < result.points.size();
    result.resolved = true;
    for (std::size_t i : {std::size_t{0}, result.points.size() - 1}) {
      if (i == result.opt_index) continue;
      if (result.points[i].ok && !clearly_better(best, result.points[i])) result.resolved = false;
    }
  }
  return result;
}

OrderFit fit_order_relation(const std::vector<std::pair<double, double>>& points, double tau_b) {
  if (points.size() < 2) throw ContractError("fit_order_relation: need at least 2 points");
  if (!(tau_b > 0.0)) throw ContractError("fit_order_relation: tau_B must be positive");
  OrderFit fit;
  const double m = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  std::vector<double> xs;
  for (const auto& [n, t] : points) {
    if (!(t > 0.0)) throw ContractError("fit_order_relation: tau_opt must be positive");
    const double x = std::log(t / tau_b);
    xs.push_back(x);
    sx += x;
    sy += n;
    fit.points.emplace_back(n, t / tau_b);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (points[i].first - my);
  }
  if (sxx < 1e-24) throw ContractError("fit_order_relation: degenerate abscissae");
  fit.b = sxy / sxx;
  fit.c = my - fit.b * mx;
  if (points.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = points[i].first - (fit.c + fit.b * xs[i]);
      rss += r * r;
    }
    const double s2 = rss / (m - 2.0);
    fit.b_sd = std::sqrt(s2 / sxx);
    fit.c_sd = std::sqrt(s2 * (1.0 / m + mx * mx / sxx));
  }
  return fit;
}

}  // namespace ddlab
