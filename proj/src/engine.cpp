#include "ddlab/engine.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "ddlab/errors.hpp"

namespace ddlab {

const char* record_mode_name(RecordMode m) {
  return m == RecordMode::EveryPulse ? "every_pulse" : "cycle_boundaries";
}

RecordMode parse_record_mode(const std::string& s) {
  if (s == "cycle_boundaries" || s == "cycles") return RecordMode::CycleBoundaries;
  if (s == "every_pulse" || s == "pulses") return RecordMode::EveryPulse;
  throw ContractError("unknown record mode '" + s + "'");
}

DensityOperator prepare_initial_state(Axis axis, const SpinBathModel& model) {
  const auto& ops = model.ops();
  const double d = static_cast<double>(ops.dim());
  return {ops.identity / d + (2.0 / d) * ops.s(axis)};
}

double survival_probability(const DensityOperator& rho_t, const Matrix& rho_0_dev, Axis axis, const OperatorSet& ops) {
  if (rho_t.dim() != ops.dim() || rho_0_dev.rows() != ops.dim()) {
    throw ContractError("survival_probability: dimension mismatch");
  }
  const Matrix& su = ops.s(axis);
  const double norm = trace_product(su, rho_0_dev).real();
  if (norm == 0.0) throw ContractError("survival_probability: initial deviation has no component along the axis");
  // Tr{S_u 1} = 0, so the identity part of rho_t drops out.
  return trace_product(su, rho_t.matrix).real() / norm;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t k) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Per-realization cache of segment propagators.
class SegmentCache {
 public:
  SegmentCache(const SpinBathModel& model, const Matrix& h_free, const Evolver& free, double rf_scale,
               const ErrorModel& errors)
      : model_(model), h_free_(h_free), free_(free), rf_scale_(rf_scale), errors_(errors) {}

  const Matrix& free(double t) {
    auto it = free_cache_.find(t);
    if (it == free_cache_.end()) it = free_cache_.emplace(t, free_.propagator(t).matrix).first;
    return it->second;
  }

  const Matrix& pulse(const PulseEvent& e) {
    const auto key = std::make_tuple(static_cast<int>(e.axis), e.angle, e.duration);
    auto it = pulse_cache_.find(key);
    if (it == pulse_cache_.end()) {
      const PulseSpec spec = make_pulse(e.axis, e.angle, e.duration);
      it = pulse_cache_.emplace(key, real_pulse(spec, rf_scale_, errors_, h_free_, model_.ops()).matrix).first;
    }
    return it->second;
  }

 private:
  const SpinBathModel& model_;
  const Matrix& h_free_;
  const Evolver& free_;
  double rf_scale_;
  const ErrorModel& errors_;
  std::map<double, Matrix> free_cache_;
  std::map<std::tuple<int, double, double>, Matrix> pulse_cache_;
};

Matrix cycle_unitary(const Timeline& tl, SegmentCache& cache, Eigen::Index dim) {
  Matrix u = Matrix::Identity(dim, dim);
  double t = 0.0;
  for (const PulseEvent& e : tl.cycle_events()) {
    const double gap = e.start - t;
    if (gap > 0.0) u = cache.free(gap) * u;
    u = cache.pulse(e) * u;
    t = e.end();
  }
  if (tl.cycle_time - t > 0.0) u = cache.free(tl.cycle_time - t) * u;
  return u;
}

struct RealizationResult {
  std::vector<double> times;
  std::vector<long> pulses;
  std::vector<double> s;
};

// Below this many cycles direct stepping beats the Schur factorization.
constexpr int kDirectCycleLimit = 12;

// Ideal rotation of one pulse event, 2x2.
Matrix2 ideal_rotation(const PulseEvent& e) {
  const RotationAxis ax = rotation_axis(e.axis, 0.0);
  return rotation2(ax.n, ax.sign * e.angle);
}

// Observable P S_u P^dagger for the ideal frame P.
Matrix frame_observable(const Matrix2& frame, Axis axis, int n_bath) {
  const Matrix2 su = spin_half(axis);
  return embed_system(frame * su * frame.adjoint(), n_bath);
}

RealizationResult run_cycles(const RunSpec& spec, SegmentCache& cache) {
  const auto& ops = spec.model->ops();
  const Timeline& tl = spec.timeline;
  const Matrix u = cycle_unitary(tl, cache, ops.dim());
  RealizationResult r;
  const Matrix& a = ops.s(spec.initial_axis);
  const double norm = trace_product(a, a).real();

  Matrix2 frame = Matrix2::Identity();
  for (const PulseEvent& e : tl.cycle_events()) frame = ideal_rotation(e) * frame;
  const Matrix2 su = spin_half(spec.initial_axis);
  const Matrix2 toggled = frame * su * frame.adjoint();
  double sign = 0.0;
  if ((toggled - su).cwiseAbs().maxCoeff() < 1e-12) sign = 1.0;
  if ((toggled + su).cwiseAbs().maxCoeff() < 1e-12) sign = -1.0;

  if (sign != 0.0 && tl.n_cycles > kDirectCycleLimit) {
    r.s = power_autocorrelation(u, a, tl.n_cycles);
    for (int m = 1; m <= tl.n_cycles; m += 2) r.s[static_cast<std::size_t>(m)] *= sign;
  } else {
    Matrix y = a;
    Matrix2 fm = Matrix2::Identity();
    r.s.push_back(1.0);
    for (int m = 1; m <= tl.n_cycles; ++m) {
      y = u * y * u.adjoint();
      fm = frame * fm;
      r.s.push_back(trace_product(frame_observable(fm, spec.initial_axis, ops.n_bath), y).real() / norm);
    }
  }
  for (int m = 0; m <= tl.n_cycles; ++m) {
    r.times.push_back(m * tl.cycle_time);
    r.pulses.push_back(static_cast<long>(m) * tl.pulses_per_cycle);
  }
  return r;
}

RealizationResult run_every_pulse(const RunSpec& spec, SegmentCache& cache) {
  const auto& ops = spec.model->ops();
  const Timeline& tl = spec.timeline;
  const DensityOperator rho0 = prepare_initial_state(spec.initial_axis, *spec.model);
  const Matrix dev0 = rho0.matrix - ops.identity / static_cast<double>(ops.dim());
  const double norm = trace_product(ops.s(spec.initial_axis), dev0).real();
  DensityOperator rho = rho0;
  Matrix2 frame = Matrix2::Identity();
  RealizationResult r;
  const double eps = 1e-9 * std::max(1.0, tl.total_time());
  auto record = [&](double t, long pulses) {
    const double s = trace_product(frame_observable(frame, spec.initial_axis, ops.n_bath), rho.matrix).real() / norm;
    if (!r.times.empty() && t <= r.times.back() + eps) {
      r.pulses.back() = pulses;
      r.s.back() = s;
      return;
    }
    r.times.push_back(t);
    r.pulses.push_back(pulses);
    r.s.push_back(s);
  };
  auto apply = [&](const Matrix& u) { rho.matrix = u * rho.matrix * u.adjoint(); };
  record(0.0, 0);
  double t = 0.0;
  long pulses = 0;
  std::size_t k = 0;
  for (int m = 0; m < tl.n_cycles; ++m) {
    const double cycle_end = (m + 1) * tl.cycle_time;
    for (int p = 0; p < tl.pulses_per_cycle; ++p, ++k) {
      const PulseEvent& e = tl.events[k];
      if (e.start - t > 0.0) apply(cache.free(e.start - t));
      apply(cache.pulse(e));
      frame = ideal_rotation(e) * frame;
      t = e.end();
      record(t, ++pulses);
    }
    if (cycle_end - t > 0.0) apply(cache.free(cycle_end - t));
    t = cycle_end;
    record(t, pulses);
  }
  return r;
}

}  // namespace

Matrix cycle_propagator(const Timeline& tl, const SpinBathModel& model, const Matrix& h_free, double rf_scale,
                        const ErrorModel& errors) {
  const Evolver free(h_free);
  SegmentCache cache(model, h_free, free, rf_scale, errors);
  return cycle_unitary(tl, cache, model.ops().dim());
}

std::vector<double> power_autocorrelation(const Matrix& u, const Matrix& a, int m_max) {
  if (u.rows() != a.rows() || u.rows() != u.cols()) throw ContractError("power_autocorrelation: dimension mismatch");
  if (m_max < 0) throw ContractError("power_autocorrelation: m_max must be >= 0");
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) throw std::runtime_error("complex Schur factorization did not converge");
  const Matrix& q = schur.matrixU();
  const Eigen::Index d = u.rows();
  Eigen::VectorXd phase(d);
  for (Eigen::Index i = 0; i < d; ++i) phase(i) = std::arg(schur.matrixT()(i, i));
  const Matrix at = q.adjoint() * a * q;
  const double norm = trace_product(a, a).real();
  if (norm == 0.0) throw ContractError("power_autocorrelation: observable is zero");

  double diag = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) diag += std::norm(at(i, i));
  const Eigen::Index n_pairs = d * (d - 1) / 2;
  Eigen::ArrayXd weight(n_pairs), delta(n_pairs);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j, ++p) {
      weight(p) = std::norm(at(i, j)) + std::norm(at(j, i));
      delta(p) = phase(j) - phase(i);
    }
  }
  const Eigen::ArrayXcd step = delta.unaryExpr([](double x) { return std::polar(1.0, x); });
  Eigen::ArrayXcd z = Eigen::ArrayXcd::Ones(n_pairs);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m_max) + 1);
  constexpr int kResync = 128;
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) {
      if (m % kResync == 0) {
        z = delta.unaryExpr([m](double x) { return std::polar(1.0, m * x); });
      } else {
        z *= step;
      }
    }
    out.push_back((diag + (weight * z.real()).sum()) / norm);
  }
  return out;
}

SurvivalTrace propagate(const RunSpec& spec) {
  if (!spec.model) throw ContractError("propagate: model is missing");
  if (spec.n_realizations < 1) throw ContractError("propagate: n_realizations must be >= 1");
  spec.errors.validate();
  if (const auto v = validate_timeline(spec.timeline); !v.empty()) {
    throw ContractError("propagate: invalid timeline: " + v.front());
  }
  const Matrix h_free = build_h_free(*spec.model);
  const Evolver free(h_free);

  const int n = spec.n_realizations;
  std::vector<RealizationResult> results(static_cast<std::size_t>(n));
  auto work = [&](int k) {
    const double scale = sample_rf_scale(spec.errors.rf, realization_seed(spec.master_seed, static_cast<std::uint64_t>(k)));
    SegmentCache cache(*spec.model, h_free, free, scale, spec.errors);
    results[static_cast<std::size_t>(k)] =
        spec.record == RecordMode::CycleBoundaries ? run_cycles(spec, cache) : run_every_pulse(spec, cache);
  };
  const int threads = std::max(1, std::min(spec.threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int k = w; k < n; k += threads) work(k);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Reduction in realization order keeps the result independent of `threads`.
  SurvivalTrace trace;
  trace.axis = spec.initial_axis;
  trace.label = spec.timeline.label;
  trace.times = results.front().times;
  trace.n_pulses = results.front().pulses;
  const std::size_t len = trace.times.size();
  trace.s.assign(len, 0.0);
  trace.std_error.assign(len, 0.0);
  for (const auto& r : results)
    for (std::size_t i = 0; i < len; ++i) trace.s[i] += r.s[i];
  for (std::size_t i = 0; i < len; ++i) trace.s[i] /= n;
  if (n > 1) {
    for (std::size_t i = 0; i < len; ++i) {
      double ss = 0.0;
      for (const auto& r : results) ss += (r.s[i] - trace.s[i]) * (r.s[i] - trace.s[i]);
      trace.std_error[i] = std::sqrt(ss / (n - 1) / n);
    }
  }
  return trace;
}

namespace {

std::vector<double> correlation_in_basis(const Evolver& ev, const Matrix& a, const std::vector<double>& t_grid) {
  const Matrix at = ev.basis().adjoint() * a * ev.basis();
  const double norm = trace_product(a, a).real();
  const Eigen::VectorXd& e = ev.energies();
  const Eigen::Index d = e.size();
  std::vector<double> out;
  out.reserve(t_grid.size());
  Eigen::ArrayXd weight(d * d), omega(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      weight(i * d + j) = std::norm(at(i, j));
      omega(i * d + j) = e(i) - e(j);
    }
  for (double t : t_grid) out.push_back((weight * (omega * t).cos()).sum() / norm);
  return out;
}

}  // namespace

namespace {

// H_E and the bath operators act trivially on the system factor, so the
// leading diagonal block carries the whole correlation.
Matrix bath_block(const Matrix& m) {
  const Eigen::Index h = m.rows() / 2;
  return m.topLeftCorner(h, h);
}

}  // namespace

std::vector<double> bath_correlation(const SpinBathModel& model, const std::vector<double>& t_grid,
                                     CorrelationKind which, int spin) {
  const auto& ops = model.ops();
  if (model.n_bath() == 0) throw ContractError("bath_correlation: model has no bath spins");
  Matrix a;
  if (which == CorrelationKind::IxTotal) {
    a = ops.i_total(Axis::X);
  } else {
    if (spin < 0 || spin >= model.n_bath()) throw ContractError("bath_correlation: spin index out of range");
    a = ops.iz[spin];
  }
  const Evolver ev(bath_block(build_h_e(model)));
  return correlation_in_basis(ev, bath_block(a), t_grid);
}

std::vector<double> bath_correlation_iz_mean(const SpinBathModel& model, const std::vector<double>& t_grid) {
  if (model.n_bath() == 0) throw ContractError("bath_correlation: model has no bath spins");
  const Evolver ev(bath_block(build_h_e(model)));
  std::vector<double> mean(t_grid.size(), 0.0);
  for (int j = 0; j < model.n_bath(); ++j) {
    const auto c = correlation_in_basis(ev, bath_block(model.ops().iz[j]), t_grid);
    for (std::size_t i = 0; i < c.size(); ++i) mean[i] += c[i] / model.n_bath();
  }
  return mean;
}

TauEstimate estimate_tau_b(const std::vector<double>& series, const std::vector<double>& times) {
  if (series.size() != times.size() || series.empty()) {
    throw ContractError("estimate_tau_b: series and times must be non-empty and of equal length");
  }
  const double target = std::exp(-1.0);
  TauEstimate est;
  est.end_value = series.back();
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] == target) {
      est.reached = true;
      est.tau = times[k];
      return est;
    }
    if (series[k] < target) {
      if (k == 0) {
        est.reached = true;
        est.tau = times[0];
        return est;
      }
      const double f = (series[k - 1] - target) / (series[k - 1] - series[k]);
      est.reached = true;
      est.tau = times[k - 1] + f * (times[k] - times[k - 1]);
      return est;
    }
  }
  return est;
}

}  // namespace ddlab
