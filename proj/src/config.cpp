#include "ddlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "ddlab/errors.hpp"

namespace ddlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

// Unit suffix carried by a key name, or "" for dimensionless keys.
std::string key_unit(const std::string& key) {
  for (const char* u : {"_us", "_khz", "_rad"}) {
    const std::size_t n = std::strlen(u);
    if (key.size() > n && key.compare(key.size() - n, n, u) == 0) return u + 1;
  }
  return "";
}

struct Ctx {
  std::string key;
  int line;
};

double parse_number(const std::string& raw, const Ctx& c) {
  std::string v = trim(raw);
  const std::string unit = key_unit(c.key);
  // the value may restate the key's own unit
  std::size_t pos = 0;
  while (pos < v.size() && (std::isdigit(static_cast<unsigned char>(v[pos])) || std::strchr("+-.eE", v[pos]))) ++pos;
  std::string num = trim(v.substr(0, pos));
  std::string suffix = trim(v.substr(pos));
  if (!suffix.empty()) {
    std::string s = lower(suffix);
    if (s == "\xce\xbcs" || s == "\xc2\xb5s") s = "us";
    if (unit.empty() || s != unit) {
      throw ConfigError("key '" + c.key + "': unsupported unit '" + suffix + "'" +
                            (unit.empty() ? " (dimensionless key)" : " (expected " + unit + ")"),
                        c.line);
    }
  }
  double x = 0.0;
  const auto res = std::from_chars(num.data(), num.data() + num.size(), x);
  if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size() || !std::isfinite(x)) {
    throw ConfigError("key '" + c.key + "': expected a number, got '" + raw + "'", c.line);
  }
  return x;
}

int parse_int(const std::string& raw, const Ctx& c) {
  const double x = parse_number(raw, c);
  if (x != std::floor(x) || std::abs(x) > 2e9) throw ConfigError("key '" + c.key + "': expected an integer", c.line);
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& raw, const Ctx& c) {
  const std::string v = trim(raw);
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + c.key + "': expected a non-negative integer", c.line);
  }
  return x;
}

bool parse_bool(const std::string& raw, const Ctx& c) {
  const std::string v = lower(trim(raw));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + c.key + "': expected true or false", c.line);
}

std::vector<double> parse_list(const std::string& raw, const Ctx& c) {
  std::vector<double> out;
  for (const auto& tok : split(raw, ',')) {
    if (tok.empty()) continue;
    out.push_back(parse_number(tok, c));
  }
  return out;
}

// "a:b:step" (inclusive) or a comma list.
std::vector<double> parse_grid(const std::string& raw, const Ctx& c) {
  const std::string v = trim(raw);
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw ConfigError("key '" + c.key + "': range must be start:stop:step", c.line);
    const double a = parse_number(parts[0], c), b = parse_number(parts[1], c), st = parse_number(parts[2], c);
    if (!(st > 0.0) || b < a) throw ConfigError("key '" + c.key + "': range needs step > 0 and stop >= start", c.line);
    std::vector<double> out;
    const long n = static_cast<long>(std::floor((b - a) / st + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + i * st);
    return out;
  }
  return parse_list(v, c);
}

template <class F>
auto wrap(F&& f, const Ctx& c) -> decltype(f()) {
  try {
    return f();
  } catch (const ContractError& e) {
    throw ConfigError("key '" + c.key + "': " + e.what(), c.line);
  }
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Ctx&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      // bath
      {"bath.n_bath", [](auto& g, auto& v, auto& c) { g.coupling.n_bath = parse_int(v, c); }},
      {"bath.mode", [](auto& g, auto& v, auto& c) {
         const std::string m = lower(trim(v));
         if (m == "random") g.coupling.mode = CouplingMode::Random;
         else if (m == "explicit") g.coupling.mode = CouplingMode::Explicit;
         else throw ConfigError("key 'mode': expected random or explicit", c.line);
       }},
      {"bath.b_scale_khz", [](auto& g, auto& v, auto& c) { g.coupling.b_scale = parse_number(v, c) * kKhzToRadPerUs; }},
      {"bath.d_scale_khz", [](auto& g, auto& v, auto& c) { g.coupling.d_scale = parse_number(v, c) * kKhzToRadPerUs; }},
      {"bath.distribution", [](auto& g, auto& v, auto& c) {
         const std::string m = lower(trim(v));
         if (m == "uniform_symmetric" || m == "uniform") g.coupling.distribution = CouplingDistribution::UniformSymmetric;
         else if (m == "gaussian") g.coupling.distribution = CouplingDistribution::Gaussian;
         else throw ConfigError("key 'distribution': expected uniform_symmetric or gaussian", c.line);
       }},
      {"bath.seed", [](auto& g, auto& v, auto& c) { g.coupling.seed = parse_u64(v, c); }},
      {"bath.b_khz", [](auto& g, auto& v, auto& c) {
         const auto xs = parse_list(v, c);
         g.b_khz = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
       }},
      {"bath.d_khz", [](auto& g, auto& v, auto& c) {
         const auto rows = split(v, ';');
         std::vector<std::vector<double>> m;
         for (const auto& r : rows)
           if (!r.empty()) m.push_back(parse_list(r, c));
         const auto n = static_cast<Eigen::Index>(m.size());
         g.d_khz = Eigen::MatrixXd::Zero(n, n);
         for (Eigen::Index i = 0; i < n; ++i) {
           if (static_cast<Eigen::Index>(m[i].size()) != n) throw ConfigError("key 'd_khz': matrix must be square", c.line);
           for (Eigen::Index j = 0; j < n; ++j) g.d_khz(i, j) = m[i][j];
         }
       }},
      // pulses
      {"pulses.rf_khz", [](auto& g, auto& v, auto& c) { g.rf_khz = parse_number(v, c); }},
      {"pulses.tau_p_us", [](auto& g, auto& v, auto& c) { g.tau_p_us = parse_number(v, c); }},
      {"pulses.delta", [](auto& g, auto& v, auto& c) { g.delta = parse_bool(v, c); }},
      // errors
      {"errors.distribution", [](auto& g, auto& v, auto& c) {
         const std::string m = lower(trim(v));
         if (m == "none" || m == "fixed") g.errors.rf.kind = RfKind::Fixed;
         else if (m == "bimodal") g.errors.rf.kind = RfKind::Bimodal;
         else if (m == "gaussian") g.errors.rf.kind = RfKind::Gaussian;
         else throw ConfigError("key 'distribution': expected none, bimodal or gaussian", c.line);
       }},
      {"errors.rf_low", [](auto& g, auto& v, auto& c) { g.errors.rf.low = parse_number(v, c); }},
      {"errors.rf_high", [](auto& g, auto& v, auto& c) { g.errors.rf.high = parse_number(v, c); }},
      {"errors.rf_weight", [](auto& g, auto& v, auto& c) { g.errors.rf.weight = parse_number(v, c); }},
      {"errors.rf_mean", [](auto& g, auto& v, auto& c) { g.errors.rf.mean = parse_number(v, c); }},
      {"errors.rf_sd", [](auto& g, auto& v, auto& c) { g.errors.rf.sd = parse_number(v, c); }},
      {"errors.flip_angle_fraction", [](auto& g, auto& v, auto& c) { g.errors.flip_angle_error = parse_number(v, c); }},
      {"errors.tilt_rad", [](auto& g, auto& v, auto& c) { g.errors.axis_tilt = parse_number(v, c); }},
      // sequence
      {"sequence.family", [](auto& g, auto& v, auto& c) { g.sequence = wrap([&] { return parse_sequence_choice(v); }, c); }},
      {"sequence.order", [](auto& g, auto& v, auto& c) { g.sequence.order = parse_int(v, c); }},
      {"sequence.tau_us", [](auto& g, auto& v, auto& c) { g.tau_us = parse_number(v, c); }},
      {"sequence.tau_grid_us", [](auto& g, auto& v, auto& c) { g.tau_grid_us = parse_grid(v, c); }},
      {"sequence.cycles", [](auto& g, auto& v, auto& c) { g.cycles = parse_int(v, c); }},
      {"sequence.time_budget_us", [](auto& g, auto& v, auto& c) { g.time_budget_us = parse_number(v, c); }},
      {"sequence.families", [](auto& g, auto& v, auto& c) {
         g.families.clear();
         for (const auto& tok : split(v, ','))
           if (!tok.empty()) g.families.push_back(wrap([&] { return parse_sequence_choice(tok); }, c));
       }},
      // run
      {"run.axis", [](auto& g, auto& v, auto& c) { g.axis = wrap([&] { return parse_axis(lower(trim(v))); }, c); }},
      {"run.realizations", [](auto& g, auto& v, auto& c) { g.realizations = parse_int(v, c); }},
      {"run.seed", [](auto& g, auto& v, auto& c) { g.seed = parse_u64(v, c); }},
      {"run.record", [](auto& g, auto& v, auto& c) { g.record = wrap([&] { return parse_record_mode(trim(v)); }, c); }},
      {"run.threads", [](auto& g, auto& v, auto& c) { g.threads = parse_int(v, c); }},
      {"run.method", [](auto& g, auto& v, auto& c) { g.method = wrap([&] { return parse_decay_method(trim(v)); }, c); }},
      // output
      {"output.directory", [](auto& g, auto& v, auto&) { g.directory = trim(v); }},
      {"output.prefix", [](auto& g, auto& v, auto&) { g.prefix = trim(v); }},
      {"output.formats", [](auto& g, auto& v, auto& c) {
         g.write_csv = g.write_json = false;
         for (const auto& tok : split(lower(v), ',')) {
           if (tok == "csv") g.write_csv = true;
           else if (tok == "json") g.write_json = true;
           else if (!tok.empty()) throw ConfigError("key 'formats': unknown format '" + tok + "'", c.line);
         }
       }},
      // corr
      {"corr.t_max_us", [](auto& g, auto& v, auto& c) { g.t_max_us = parse_number(v, c); }},
      {"corr.t_step_us", [](auto& g, auto& v, auto& c) { g.t_step_us = parse_number(v, c); }},
      // fit
      {"fit.points", [](auto& g, auto& v, auto& c) {
         g.fit_points.clear();
         for (const auto& tok : split(v, ',')) {
           if (tok.empty()) continue;
           const auto nt = split(tok, ':');
           if (nt.size() != 2) throw ConfigError("key 'points': expected n:tau_opt pairs", c.line);
           g.fit_points.emplace_back(parse_number(nt[0], {"points", c.line}), parse_number(nt[1], {"points", c.line}));
         }
       }},
      {"fit.tau_b_us", [](auto& g, auto& v, auto& c) { g.tau_b_us = parse_number(v, c); }},
      {"fit.orders", [](auto& g, auto& v, auto& c) {
         g.fit_orders.clear();
         for (double x : parse_list(v, c)) g.fit_orders.push_back(static_cast<int>(x));
       }},
      // verify
      {"verify.tau_us", [](auto& g, auto& v, auto& c) { g.verify_tau_us = parse_number(v, c); }},
      {"verify.flip_angle_fraction", [](auto& g, auto& v, auto& c) { g.verify_flip_error = parse_number(v, c); }},
  };
  return table;
}

void validate(const ExperimentConfig& g, const std::map<std::string, int>& lines) {
  auto line_of = [&](const std::string& k) {
    const auto it = lines.find(k);
    return it == lines.end() ? 0 : it->second;
  };
  auto fail = [&](const std::string& k, const std::string& msg) {
    const auto dot = k.find('.');
    throw ConfigError("key '" + k.substr(dot + 1) + "': " + msg, line_of(k));
  };
  if (g.coupling.n_bath < 1) fail("bath.n_bath", "must be >= 1");
  if (g.coupling.mode == CouplingMode::Random) {
    if (!(g.coupling.d_scale > 0.0)) fail("bath.d_scale_khz", "must be > 0 in random mode");
    if (!(g.coupling.b_scale >= 0.0)) fail("bath.b_scale_khz", "must be >= 0");
  } else {
    if (g.b_khz.size() == 0) fail("bath.b_khz", "required in explicit mode");
    if (g.d_khz.rows() != g.b_khz.size()) fail("bath.d_khz", "must be n x n with n = len(b_khz)");
    if ((g.d_khz - g.d_khz.transpose()).cwiseAbs().maxCoeff() > 0.0) fail("bath.d_khz", "must be symmetric");
    if (g.d_khz.diagonal().cwiseAbs().maxCoeff() > 0.0) fail("bath.d_khz", "diagonal must be zero");
  }
  if (!(g.rf_khz > 0.0)) fail("pulses.rf_khz", "must be > 0");
  if (g.tau_p_us && !(*g.tau_p_us >= 0.0)) fail("pulses.tau_p_us", "must be >= 0");
  if (g.tau_us && !(*g.tau_us > 0.0)) fail("sequence.tau_us", "must be > 0");
  for (double t : g.tau_grid_us)
    if (!(t > 0.0)) fail("sequence.tau_grid_us", "values must be > 0");
  if (g.cycles < 0) fail("sequence.cycles", "must be >= 0");
  if (g.time_budget_us < 0.0) fail("sequence.time_budget_us", "must be >= 0");
  if (g.realizations < 1) fail("run.realizations", "must be >= 1");
  if (g.threads < 1) fail("run.threads", "must be >= 1");
  if (!(g.t_step_us > 0.0) || !(g.t_max_us > 0.0)) fail("corr.t_step_us", "t_step_us and t_max_us must be > 0");
  const auto& rf = g.errors.rf;
  if (rf.kind == RfKind::Bimodal) {
    if (!(rf.weight >= 0.0 && rf.weight <= 1.0)) fail("errors.rf_weight", "must lie in [0, 1]");
    if (!(rf.low > 0.0)) fail("errors.rf_low", "must be > 0");
    if (!(rf.high > 0.0)) fail("errors.rf_high", "must be > 0");
  }
  if (rf.kind == RfKind::Gaussian) {
    if (!(rf.mean > 0.0)) fail("errors.rf_mean", "must be > 0");
    if (!(rf.sd >= 0.0)) fail("errors.rf_sd", "must be >= 0");
  }
  try {
    g.errors.validate();
  } catch (const ContractError& e) {
    fail("errors.distribution", e.what());
  }
}

}  // namespace

SequenceChoice parse_sequence_choice(const std::string& s) {
  std::string k = lower(trim(s));
  std::size_t p = k.size();
  while (p > 0 && std::isdigit(static_cast<unsigned char>(k[p - 1]))) --p;
  SequenceChoice c;
  const std::string stem = k.substr(0, p), digits = k.substr(p);
  if (k == "cpmg2" || k == "cpmg-2") return {Family::CPMG2, 1};
  c.family = parse_family(digits.empty() ? k : stem);
  if (!digits.empty()) {
    if (c.family != Family::CDD && c.family != Family::UDD) throw ContractError("'" + s + "' takes no order");
    c.order = std::stoi(digits);
  } else if (c.family == Family::UDD) {
    c.order = 2;
  }
  return c;
}

std::string sequence_choice_name(const SequenceChoice& c) { return sequence_label(c.family, c.order); }

ExperimentConfig default_config() {
  ExperimentConfig g;
  g.coupling.mode = CouplingMode::Random;
  g.coupling.n_bath = 7;
  g.coupling.d_scale = 3.0 * kKhzToRadPerUs;
  g.coupling.b_scale = 3.0 * kKhzToRadPerUs;
  g.coupling.seed = 1;
  return g;
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig g = default_config();
  std::map<std::string, int> lines;
  const auto& table = setters();
  std::string section, raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    // ';' inside d_khz separates rows, so only a leading ';' starts a comment
    if (hash != std::string::npos && (line[hash] == '#' || trim(line.substr(0, hash)).empty())) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = lower(trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"bath", "pulses", "errors", "sequence", "run", "output", "corr", "fit", "verify"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return section == k; }) == std::end(known)) {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    const auto it = table.find(full);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    if (lines.count(full)) throw ConfigError("duplicate key '" + key + "'", line_no);
    it->second(g, value, Ctx{key, line_no});
    lines[full] = line_no;
    g.entries[full] = value;
  }
  validate(g, lines);
  return g;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.entries) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::shared_ptr<SpinBathModel> build_model(const ExperimentConfig& cfg) {
  if (cfg.coupling.mode == CouplingMode::Explicit) {
    return std::make_shared<SpinBathModel>(cfg.b_khz * kKhzToRadPerUs, cfg.d_khz * kKhzToRadPerUs);
  }
  const Couplings c = sample_couplings(cfg.coupling);
  return std::make_shared<SpinBathModel>(c.b, c.d);
}

std::uint64_t couplings_hash(const SpinBathModel& model) {
  std::string bytes;
  auto add = [&](double x) { bytes.append(reinterpret_cast<const char*>(&x), sizeof x); };
  for (Eigen::Index i = 0; i < model.b().size(); ++i) add(model.b()(i));
  for (Eigen::Index i = 0; i < model.d().rows(); ++i)
    for (Eigen::Index j = 0; j < model.d().cols(); ++j) add(model.d()(i, j));
  return fnv1a64(bytes);
}

double pulse_duration_us(const ExperimentConfig& cfg) {
  if (cfg.delta) return 0.0;
  if (cfg.tau_p_us) return *cfg.tau_p_us;
  return pi_pulse_duration_us(cfg.rf_khz);
}

}  // namespace ddlab
