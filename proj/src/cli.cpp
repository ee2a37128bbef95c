#include "ddlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ddlab/analysis.hpp"
#include "ddlab/avgham.hpp"
#include "ddlab/config.hpp"
#include "ddlab/errors.hpp"

namespace ddlab {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Context {
  ExperimentConfig cfg;
  std::string fingerprint;
  bool dump_timeline = false;
  bool fair = false;
  std::ostream* out = nullptr;
};

std::filesystem::path output_path(const Context& ctx, const std::string& suffix) {
  std::filesystem::create_directories(ctx.cfg.directory);
  return std::filesystem::path(ctx.cfg.directory) / (ctx.cfg.prefix + "_" + suffix);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << text;
}

void write_json(const Context& ctx, const std::string& suffix, json j) {
  if (!ctx.cfg.write_json) return;
  j["fingerprint"] = ctx.fingerprint;
  const auto p = output_path(ctx, suffix);
  write_text(p, j.dump(2) + "\n");
  *ctx.out << "wrote " << p.string() << "\n";
}

void write_csv(const Context& ctx, const std::string& suffix, const std::string& header, const std::string& body) {
  if (!ctx.cfg.write_csv) return;
  const auto p = output_path(ctx, suffix);
  write_text(p, "# fingerprint=" + ctx.fingerprint + "\n" + header + body);
  *ctx.out << "wrote " << p.string() << "\n";
}

json decay_json(const DecaySummary& d) {
  json j;
  j["method"] = decay_method_name(d.method);
  j["reached"] = d.reached;
  j["decay_time_us"] = d.reached ? json(d.decay_time) : json(nullptr);
  j["end_value"] = d.end_value;
  return j;
}

double require_tau(const ExperimentConfig& cfg) {
  if (!cfg.tau_us) throw ConfigError("key 'tau_us' in [sequence] is required for this command");
  return *cfg.tau_us;
}

void require_length(const ExperimentConfig& cfg) {
  if (cfg.cycles == 0 && cfg.time_budget_us == 0.0) {
    throw ConfigError("[sequence] needs 'cycles' or 'time_budget_us'");
  }
}

int cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double tau = require_tau(cfg);
  require_length(cfg);
  const auto model = build_model(cfg);
  const double tau_p = pulse_duration_us(cfg);
  RunSpec run;
  run.model = model;
  run.timeline = sweep_timeline(cfg.sequence.family, cfg.sequence.order, tau, tau_p, ctx.fair, cfg.time_budget_us, cfg.cycles);
  run.errors = cfg.errors;
  run.initial_axis = cfg.axis;
  run.n_realizations = cfg.realizations;
  run.master_seed = cfg.seed;
  run.record = cfg.record;
  run.threads = cfg.threads;
  if (ctx.dump_timeline) {
    std::ostringstream os;
    write_timeline(os, run.timeline);
    const auto p = output_path(ctx, "timeline.txt");
    write_text(p, os.str());
    *ctx.out << "wrote " << p.string() << "\n";
  }
  const SurvivalTrace trace = propagate(run);
  const std::string chash = hex64(couplings_hash(*model));

  std::string body;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    body += fmt(trace.times[i]) + "," + std::to_string(trace.n_pulses[i]) + "," + fmt(trace.s[i]) + "," +
            fmt(trace.std_error[i]) + "\n";
  }
  const std::string header = "# seed=" + std::to_string(cfg.seed) + " couplings_hash=" + chash + " label=" + trace.label +
                             " axis=" + axis_name(trace.axis) + "\ntime_us,n_pulses,s,stderr\n";
  write_csv(ctx, "trace.csv", header, body);

  json j;
  j["command"] = "simulate";
  j["label"] = trace.label;
  j["axis"] = axis_name(trace.axis);
  j["seed"] = cfg.seed;
  j["couplings_hash"] = chash;
  j["n_bath"] = model->n_bath();
  j["tau_us"] = tau;
  j["tau_p_us"] = tau_p;
  j["cycle_time_us"] = run.timeline.cycle_time;
  j["cycles"] = run.timeline.n_cycles;
  j["realizations"] = cfg.realizations;
  j["record"] = record_mode_name(cfg.record);
  if (trace.size() >= 4) {
    j["decay"] = json::array({decay_json(decay_time(trace, DecayMethod::OneOverE)), decay_json(decay_time(trace, DecayMethod::ExpFit))});
  }
  j["final_s"] = trace.s.back();
  write_json(ctx, "meta.json", j);
  *ctx.out << trace.label << ": " << trace.size() << " samples, s(end) = " << trace.s.back() << "\n";
  return kExitOk;
}

double model_tau_b(const SpinBathModel& model, const ExperimentConfig& cfg, TauEstimate* est = nullptr) {
  std::vector<double> t;
  for (double x = 0.0; x <= cfg.t_max_us + 1e-9; x += cfg.t_step_us) t.push_back(x);
  const TauEstimate e = estimate_tau_b(bath_correlation_iz_mean(model, t), t);
  if (est) *est = e;
  if (!e.reached) throw std::runtime_error("bath correlation does not reach 1/e within t_max_us");
  return e.tau;
}

std::vector<SequenceChoice> sweep_families(const Context& ctx, const std::string& cli_families) {
  if (!cli_families.empty()) {
    std::vector<SequenceChoice> out;
    std::stringstream ss(cli_families);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        out.push_back(parse_sequence_choice(tok));
      } catch (const ContractError& e) {
        throw ConfigError(std::string("--families: ") + e.what());
      }
    }
    return out;
  }
  if (!ctx.cfg.families.empty()) return ctx.cfg.families;
  return {ctx.cfg.sequence};
}

SweepSpec make_sweep(const Context& ctx, const SequenceChoice& fam, std::shared_ptr<const SpinBathModel> model) {
  const auto& cfg = ctx.cfg;
  SweepSpec sp;
  sp.family = fam.family;
  sp.order = fam.order;
  sp.tau_grid = cfg.tau_grid_us;
  sp.tau_p = pulse_duration_us(cfg);
  sp.time_budget = cfg.time_budget_us;
  sp.fair = ctx.fair;
  sp.model = std::move(model);
  sp.errors = cfg.errors;
  sp.axis = cfg.axis;
  sp.n_realizations = cfg.realizations;
  sp.seed = cfg.seed;
  sp.threads = cfg.threads;
  sp.method = cfg.method;
  return sp;
}

json sweep_json(const SweepResult& r) {
  json j;
  j["label"] = r.label;
  j["has_opt"] = r.has_opt;
  j["tau_opt_us"] = r.has_opt ? json(r.tau_opt) : json(nullptr);
  j["interior"] = r.interior;
  j["resolved"] = r.resolved;
  json pts = json::array();
  for (const auto& p : r.points) {
    json q;
    q["tau_us"] = p.tau;
    q["tau_c_us"] = p.tau_c;
    q["cycles"] = p.n_cycles;
    q["ok"] = p.ok;
    if (p.ok) {
      q["decay"] = decay_json(p.summary);
      q["cross_check"] = decay_json(p.cross_check);
    } else {
      q["error"] = p.error;
    }
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

int cmd_sweep(Context& ctx, const std::string& cli_families) {
  const auto& cfg = ctx.cfg;
  if (cfg.tau_grid_us.empty()) throw ConfigError("key 'tau_grid_us' in [sequence] is required and must be non-empty");
  if (cfg.time_budget_us <= 0.0) throw ConfigError("key 'time_budget_us' in [sequence] is required for sweeps");
  const auto families = sweep_families(ctx, cli_families);
  const std::shared_ptr<const SpinBathModel> model = build_model(cfg);
  std::string body;
  json j;
  j["command"] = "sweep";
  j["fair"] = ctx.fair;
  j["seed"] = cfg.seed;
  j["couplings_hash"] = hex64(couplings_hash(*model));
  j["axis"] = axis_name(cfg.axis);
  j["method"] = decay_method_name(cfg.method);
  json fams = json::array();
  std::vector<std::pair<double, double>> cdd_points;
  for (const auto& fam : families) {
    const SweepResult r = sweep_tau(make_sweep(ctx, fam, model));
    for (const auto& p : r.points) {
      std::string flag = p.ok ? (p.summary.reached ? "ok" : "not_reached") : "error";
      std::string decay = p.ok && p.summary.reached ? fmt(p.summary.decay_time) : "";
      std::string cross = p.ok && p.cross_check.reached ? fmt(p.cross_check.decay_time) : "";
      body += fmt(p.tau) + "," + fmt(p.tau_c) + "," + decay + "," + decay_method_name(cfg.method) + "," + flag + "," +
              r.label + "," + std::to_string(p.n_cycles) + "," + (p.ok ? fmt(p.summary.end_value) : "") + "," + cross + "\n";
    }
    fams.push_back(sweep_json(r));
    if (r.has_opt && (fam.family == Family::CDD || fam.family == Family::PDD)) {
      cdd_points.emplace_back(fam.family == Family::PDD ? 1 : fam.order, r.tau_opt);
    }
    *ctx.out << r.label << ": tau_opt = " << (r.has_opt ? fmt(r.tau_opt) : "none") << " us"
             << (r.interior ? " (interior)" : "") << "\n";
  }
  j["families"] = fams;
  if (cdd_points.size() >= 2) {
    try {
      TauEstimate est;
      const double tau_b = model_tau_b(*model, cfg, &est);
      const OrderFit f = fit_order_relation(cdd_points, tau_b);
      j["fit"] = {{"c", f.c}, {"c_sd", f.c_sd}, {"b", f.b}, {"b_sd", f.b_sd}, {"tau_b_us", tau_b}};
    } catch (const std::exception& e) {
      j["fit"] = {{"error", e.what()}};
    }
  }
  write_csv(ctx, "sweep.csv", "tau_us,tau_c_us,decay_time_us,method,flag,family,cycles,end_value,cross_check_us\n", body);
  write_json(ctx, "sweep.json", j);
  return kExitOk;
}

int cmd_corr(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto model = build_model(cfg);
  std::vector<double> t;
  for (double x = 0.0; x <= cfg.t_max_us + 1e-9; x += cfg.t_step_us) t.push_back(x);
  const auto ix = bath_correlation(*model, t, CorrelationKind::IxTotal);
  const auto mean = bath_correlation_iz_mean(*model, t);
  std::vector<std::vector<double>> iz;
  for (int j = 0; j < model->n_bath(); ++j) iz.push_back(bath_correlation(*model, t, CorrelationKind::IzSingle, j));
  std::string header = "time_us,ix_total,iz_mean";
  for (int j = 0; j < model->n_bath(); ++j) header += ",iz_" + std::to_string(j + 1);
  header += "\n";
  std::string body;
  for (std::size_t i = 0; i < t.size(); ++i) {
    body += fmt(t[i]) + "," + fmt(ix[i]) + "," + fmt(mean[i]);
    for (const auto& c : iz) body += "," + fmt(c[i]);
    body += "\n";
  }
  write_csv(ctx, "corr.csv", header, body);
  const TauEstimate est = estimate_tau_b(mean, t);
  json j;
  j["command"] = "corr";
  j["couplings_hash"] = hex64(couplings_hash(*model));
  j["tau_b_us"] = est.reached ? json(est.tau) : json(nullptr);
  j["reached"] = est.reached;
  j["end_value"] = est.end_value;
  json per = json::array();
  for (const auto& c : iz) {
    const TauEstimate e = estimate_tau_b(c, t);
    per.push_back(e.reached ? json(e.tau) : json(nullptr));
  }
  j["tau_b_per_spin_us"] = per;
  const TauEstimate ex = estimate_tau_b(ix, t);
  j["ix_decay_us"] = ex.reached ? json(ex.tau) : json(nullptr);
  const double bmax = model->b().cwiseAbs().maxCoeff();
  j["max_abs_b_tau_b"] = est.reached ? json(bmax * est.tau) : json(nullptr);
  write_json(ctx, "corr.json", j);
  *ctx.out << "tau_B = " << (est.reached ? fmt(est.tau) + " us" : "not reached (end " + fmt(est.end_value) + ")") << "\n";
  return kExitOk;
}

json decomposition_json(const Matrix& h, const OperatorSet& ops) {
  const auto d = decompose(h, ops);
  json j;
  j["norm"] = h.norm();
  j["a"] = {d.a(0), d.a(1), d.a(2)};
  json b = json::array();
  for (int u = 0; u < 3; ++u) {
    json row = json::array();
    for (int k = 0; k < d.b.cols(); ++k) row.push_back(d.b(u, k));
    b.push_back(row);
  }
  j["b"] = b;
  j["system_part_norm"] = d.system_part.norm();
  j["bath_part_norm"] = d.bath_part.norm();
  return j;
}

int cmd_avgham(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double tau = require_tau(cfg);
  const auto model = build_model(cfg);
  const double tau_p = pulse_duration_us(cfg);
  const Timeline tl = sweep_timeline(cfg.sequence.family, cfg.sequence.order, tau, tau_p, ctx.fair, 0.0, 1);
  const Matrix h = build_h_free(*model);
  const bool ideal = tau_p == 0.0 && cfg.errors.is_ideal();
  const PulseModel pm = ideal ? PulseModel::ideal() : PulseModel::errored(cfg.errors, cfg.errors.rf.kind == RfKind::Fixed ? 1.0 : cfg.errors.rf.mean);
  const auto segs = toggling_frames(tl, h, model->ops(), pm);
  const Matrix h0 = average_hamiltonian(segs, 0), h1 = average_hamiltonian(segs, 1);
  const Matrix exact = cycle_propagator(tl, *model, h, pm.rf_scale, pm.errors);
  const Matrix approx = magnus_propagator(segs, cycle_frame(tl, model->ops()));
  json j;
  j["command"] = "avgham";
  j["label"] = tl.label;
  j["pulse_model"] = ideal ? "ideal" : "errored";
  j["cycle_time_us"] = tl.cycle_time;
  j["segments"] = segs.size();
  j["h0"] = decomposition_json(h0, model->ops());
  j["h1"] = decomposition_json(h1, model->ops());
  j["magnus_error"] = (exact - approx).norm();
  write_json(ctx, "avgham.json", j);
  *ctx.out << tl.label << ": |H0| = " << h0.norm() << ", |H1| = " << h1.norm()
           << ", |U - U_magnus| = " << (exact - approx).norm() << "\n";
  return kExitOk;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::vector<CheckResult> bookkeeping_checks() {
  std::vector<CheckResult> out;
  const double tp = 10.4;
  auto cycle = [&](const std::string& name, const Timeline& tl, double expect) {
    out.push_back({name, near(tl.cycle_time, expect, 0.1), "tau_c = " + fmt_short(tl.cycle_time) + " us, expected " + fmt_short(expect)});
  };
  cycle("CPMG tau_c at tau=30", compile_cpmg(30, tp, 1, CpmgVariant::CPMG), 80.8);
  cycle("PDD tau_c at tau=40", compile_pdd(40, tp, 1), 201.6);
  cycle("PDD tau_c at tau=70", compile_pdd(70, tp, 1), 321.6);
  cycle("CDD2 tau_c at tau=30", compile_cdd(2, 30, tp, 1), 688.0);
  cycle("CDD3 tau_c at tau=10", compile_cdd(3, 10, tp, 1), 1513.6);
  const int counts[] = {4, 20, 84, 340};
  for (int n = 1; n <= 4; ++n) {
    const Timeline tl = compile_cdd(n, 10, 0.0, 1);
    const bool ok = cdd_pulse_count(n) == counts[n - 1] && tl.pulses_per_cycle == counts[n - 1];
    out.push_back({"CDD" + std::to_string(n) + " pulse count", ok, std::to_string(tl.pulses_per_cycle) + " pulses"});
  }
  {
    const Timeline a = compile_udd(1, 60.0, 0.0, 1), b = compile_hahn(30.0, 0.0, 1);
    const bool ok = a.events.size() == b.events.size() && near(a.cycle_time, b.cycle_time, 1e-12) &&
                    near(a.events[0].start, b.events[0].start, 1e-12) && a.events[0].axis == b.events[0].axis;
    out.push_back({"UDD1 = Hahn layout", ok, ""});
  }
  {
    const Timeline a = compile_udd(2, 60.0, 0.0, 1), b = compile_cpmg(30.0, 0.0, 1, CpmgVariant::CPMG);
    bool ok = a.events.size() == b.events.size() && near(a.cycle_time, b.cycle_time, 1e-12);
    for (std::size_t i = 0; ok && i < a.events.size(); ++i) {
      ok = near(a.events[i].start, b.events[i].start, 1e-12) && a.events[i].axis == b.events[i].axis &&
           a.events[i].angle == b.events[i].angle;
    }
    out.push_back({"UDD2 = CPMG event for event", ok, ""});
  }
  {
    const Timeline a = compile_udd(4, 1.0, 0.0, 1);
    const double f[] = {0.0954915028125263, 0.3454915028125263, 0.6545084971874737, 0.9045084971874737};
    bool ok = a.events.size() == 4;
    std::string d;
    for (std::size_t i = 0; ok && i < 4; ++i) {
      ok = near(a.events[i].start, f[i], 1e-12);
      d += fmt_short(a.events[i].start) + " ";
    }
    out.push_back({"UDD4 fractional pulse times", ok, d});
  }
  return out;
}

namespace {

int cmd_verify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto model = build_model(cfg);
  ClaimParams params;
  params.tau = cfg.verify_tau_us;
  params.flip_angle_error = cfg.verify_flip_error;
  params.seed = cfg.seed;
  bool all = true;
  json j;
  j["command"] = "verify";
  json claims = json::array();
  *ctx.out << "claim  pass  detail\n";
  for (const auto& id : claim_ids()) {
    const ClaimReport r = verify_claim(id, *model, params);
    all = all && r.pass;
    claims.push_back({{"claim", r.claim}, {"description", r.description}, {"norms", r.norms}, {"tolerance", r.tolerance}, {"pass", r.pass}});
    *ctx.out << "(" << r.claim << ")    " << (r.pass ? "PASS" : "FAIL") << "  " << r.description << "\n";
  }
  json checks = json::array();
  for (const auto& c : bookkeeping_checks()) {
    all = all && c.pass;
    checks.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    *ctx.out << "       " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
  }
  j["claims"] = claims;
  j["checks"] = checks;
  j["pass"] = all;
  write_json(ctx, "verify.json", j);
  return all ? kExitOk : kExitFailure;
}

int cmd_fit(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::pair<double, double>> pts = cfg.fit_points;
  double tau_b = 0.0;
  json sweeps = json::array();
  if (pts.empty()) {
    if (cfg.tau_grid_us.empty()) throw ConfigError("[fit] needs 'points' or a [sequence] tau_grid_us to sweep CDD orders");
    if (cfg.time_budget_us <= 0.0) throw ConfigError("key 'time_budget_us' in [sequence] is required for sweeps");
    const std::shared_ptr<const SpinBathModel> model = build_model(cfg);
    tau_b = cfg.tau_b_us ? *cfg.tau_b_us : model_tau_b(*model, cfg);
    for (int n : cfg.fit_orders) {
      const SweepResult r = sweep_tau(make_sweep(ctx, {Family::CDD, n}, model));
      sweeps.push_back(sweep_json(r));
      if (r.has_opt) pts.emplace_back(n, r.tau_opt);
      *ctx.out << r.label << ": tau_opt = " << (r.has_opt ? fmt(r.tau_opt) : "none") << " us\n";
    }
  } else {
    tau_b = cfg.tau_b_us ? *cfg.tau_b_us : model_tau_b(*build_model(cfg), cfg);
  }
  const OrderFit f = fit_order_relation(pts, tau_b);
  json j;
  j["command"] = "fit";
  j["relation"] = "n = c + b ln(tau_opt / tau_B)";
  j["tau_b_us"] = tau_b;
  j["c"] = f.c;
  j["c_sd"] = f.c_sd;
  j["b"] = f.b;
  j["b_sd"] = f.b_sd;
  json p = json::array();
  for (const auto& [n, x] : f.points) p.push_back({{"n", n}, {"tau_opt_over_tau_b", x}});
  j["points"] = p;
  j["reference"] = {{"c", kPaperOrderC}, {"c_sd", kPaperOrderCSd}, {"b", kPaperOrderB}, {"b_sd", kPaperOrderBSd}};
  if (!sweeps.empty()) j["sweeps"] = sweeps;
  write_json(ctx, "fit.json", j);
  *ctx.out << "c = " << f.c << " +- " << f.c_sd << ", b = " << f.b << " +- " << f.b_sd << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ddlab: dynamical decoupling on a central spin coupled to a spin bath"};
  app.require_subcommand(1);
  std::string config_path, out_dir, families;
  std::int64_t seed = -1;
  int threads = 0;
  bool dump = false, fair = false;
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--seed", seed, "master seed for RF realizations")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads, "worker threads (1 = sequential)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (overrides [output] directory)");
  app.add_flag("--dump-timeline", dump, "write the compiled pulse timeline");
  app.add_flag("--fair", fair, "common average pulse rate across families");
  app.add_option("--families", families, "comma list such as cpmg,pdd,cdd2,udd4 (sweep)");
  auto* sim = app.add_subcommand("simulate", "survival trace for one sequence");
  auto* sweep = app.add_subcommand("sweep", "decay time versus tau");
  auto* corr = app.add_subcommand("corr", "bath correlation functions and tau_B");
  auto* avg = app.add_subcommand("avgham", "average Hamiltonian of one cycle");
  auto* ver = app.add_subcommand("verify", "average-Hamiltonian claims and bookkeeping checks");
  auto* fit = app.add_subcommand("fit", "CDD order versus optimal delay");
  for (auto* s : {sim, sweep, corr, avg, ver, fit}) s->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Context ctx;
  ctx.out = &out;
  ctx.dump_timeline = dump;
  ctx.fair = fair;
  try {
    ctx.cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed >= 0) ctx.cfg.seed = static_cast<std::uint64_t>(seed);
    if (threads > 0) ctx.cfg.threads = threads;
    if (!out_dir.empty()) ctx.cfg.directory = out_dir;
    std::string canon = canonical_config(ctx.cfg) + "run.seed.effective = " + std::to_string(ctx.cfg.seed) + "\n";
    if (fair) canon += "fair = true\n";
    if (!families.empty()) canon += "families = " + families + "\n";
    ctx.fingerprint = hex64(fnv1a64(canon));

    if (sim->parsed()) return cmd_simulate(ctx);
    if (sweep->parsed()) return cmd_sweep(ctx, families);
    if (corr->parsed()) return cmd_corr(ctx);
    if (avg->parsed()) return cmd_avgham(ctx);
    if (ver->parsed()) return cmd_verify(ctx);
    if (fit->parsed()) return cmd_fit(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ddlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ddlab
