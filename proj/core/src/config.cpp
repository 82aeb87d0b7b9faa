#include "irs/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace irs {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || t.empty()) throw ConfigError("not a number: '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_unsigned(std::string_view text, const char* what) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(std::string(what) + " must be a non-negative integer, got '" + std::string(text) + "'");
  return value;
}

// Splits "<number> <unit>" into its parts; the unit is lower-cased.
std::pair<double, std::string> split_unit(std::string_view text) {
  const std::string t = trim(text);
  for (std::string unit : {"dbm", "db"}) {
    const std::string lt = lower(t);
    if (lt.size() > unit.size() && lt.compare(lt.size() - unit.size(), unit.size(), unit) == 0)
      return {parse_number(std::string_view(t).substr(0, t.size() - unit.size())), unit};
  }
  return {parse_number(t), ""};
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Key-checked access to a YAML mapping.
class Section {
 public:
  Section(YAML::Node node, std::string name) : node_(std::move(node)), name_(std::move(name)) {
    if (node_ && !node_.IsMap()) throw ConfigError("'" + name_ + "' must be a mapping");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_ && node_[key];
  }
  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }
  std::string text(const std::string& key) { return get(key).as<std::string>(); }
  double number(const std::string& key) { return parse_number(text(key)); }
  int integer(const std::string& key) {
    const double x = number(key);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(name_ + "." + key + " must be an integer");
    return static_cast<int>(x);
  }
  bool flag(const std::string& key) { return get(key).as<bool>(); }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in '" + name_ + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  std::set<std::string> seen_;
};

Vec3 vec3(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 3) throw ConfigError(what + " must be a list of 3 numbers");
  return {parse_number(node[0].as<std::string>()), parse_number(node[1].as<std::string>()),
          parse_number(node[2].as<std::string>())};
}

std::vector<double> numbers(const YAML::Node& node) {
  std::vector<double> out;
  if (node.IsSequence()) {
    for (const auto& x : node) out.push_back(parse_number(x.as<std::string>()));
  } else {
    out = parse_grid(node.as<std::string>());
  }
  return out;
}

void parse_scenario(Section& sec, Scenario& s) {
  if (sec.has("ap_position")) s.ap_position = vec3(sec.get("ap_position"), "ap_position");
  if (sec.has("ap_antennas")) s.ap_antennas = sec.integer("ap_antennas");
  if (sec.has("irs_position")) s.irs_position = vec3(sec.get("irs_position"), "irs_position");
  if (sec.has("irs_elements")) {
    const auto n = sec.get("irs_elements");
    if (!n.IsSequence() || n.size() != 2) throw ConfigError("irs_elements must be [horizontal, vertical]");
    s.irs_horizontal = n[0].as<int>();
    s.irs_vertical = n[1].as<int>();
  }
  if (sec.has("users")) {
    const auto u = sec.get("users");
    s.user_positions.clear();
    if (u.IsMap()) {
      Section semi(u["semicircle"], "scenario.users.semicircle");
      if (!u["semicircle"] || u.size() != 1) throw ConfigError("users mapping must hold only 'semicircle'");
      s.user_positions = semicircle_users(vec3(semi.get("center"), "semicircle.center"), semi.number("radius"),
                                          semi.integer("count"));
      semi.reject_unknown();
    } else if (u.IsSequence()) {
      for (const auto& p : u) s.user_positions.push_back(vec3(p, "user position"));
    } else {
      throw ConfigError("users must be a list of positions or a semicircle mapping");
    }
  }
  const auto k_users = static_cast<std::size_t>(s.users());
  if (sec.has("transmit_power")) s.transmit_power = parse_power(sec.text("transmit_power"));
  s.noise_powers.resize(k_users, s.noise_powers.empty() ? 1e-11 : s.noise_powers.front());
  if (sec.has("noise_power")) {
    const auto n = sec.get("noise_power");
    if (n.IsSequence()) {
      s.noise_powers.clear();
      for (const auto& x : n) s.noise_powers.push_back(parse_power(x.as<std::string>()));
    } else {
      s.noise_powers.assign(k_users, parse_power(n.as<std::string>()));
    }
  }
  if (sec.has("direct_link")) s.direct_link = sec.flag("direct_link");
  if (sec.has("path_loss")) {
    Section pl(sec.get("path_loss"), "scenario.path_loss");
    if (pl.has("c0")) s.path_loss.c0 = parse_ratio(pl.text("c0"));
    if (pl.has("d0")) s.path_loss.d0 = pl.number("d0");
    if (pl.has("alpha_au")) s.path_loss.alpha_au = pl.number("alpha_au");
    if (pl.has("alpha_ai")) s.path_loss.alpha_ai = pl.number("alpha_ai");
    if (pl.has("alpha_iu")) s.path_loss.alpha_iu = pl.number("alpha_iu");
    pl.reject_unknown();
  }
  if (sec.has("rician")) {
    Section r(sec.get("rician"), "scenario.rician");
    if (r.has("beta_au")) s.rician.beta_au = parse_rician(r.text("beta_au"));
    if (r.has("beta_ai")) s.rician.beta_ai = parse_rician(r.text("beta_ai"));
    if (r.has("beta_iu")) s.rician.beta_iu = parse_rician(r.text("beta_iu"));
    r.reject_unknown();
  }
  s.correlation.r_rk.resize(k_users, s.correlation.r_rk.empty() ? 0.0 : s.correlation.r_rk.front());
  if (sec.has("correlation")) {
    Section c(sec.get("correlation"), "scenario.correlation");
    if (c.has("r_d")) s.correlation.r_d = c.number("r_d");
    if (c.has("r_r")) s.correlation.r_r = c.number("r_r");
    if (c.has("r_rk")) {
      const auto n = c.get("r_rk");
      if (n.IsSequence()) s.correlation.r_rk = numbers(n);
      else s.correlation.r_rk.assign(k_users, parse_number(n.as<std::string>()));
    }
    c.reject_unknown();
  }
}

void parse_pdd(Section& sec, PddParams& p) {
  if (sec.has("rho0")) p.rho0 = sec.number("rho0");
  if (sec.has("c")) p.c = sec.number("c");
  if (sec.has("eps_in")) p.eps_in = sec.number("eps_in");
  if (sec.has("eps_out")) p.eps_out = sec.number("eps_out");
  if (sec.has("max_inner")) p.max_inner = sec.integer("max_inner");
  if (sec.has("max_outer")) p.max_outer = sec.integer("max_outer");
}

void parse_ssca(Section& sec, SscaParams& p) {
  if (sec.has("samples_per_iter")) p.samples_per_iter = sec.integer("samples_per_iter");
  if (sec.has("tau")) p.tau = sec.number("tau");
  if (sec.has("rho_exponent")) p.rho_exponent = sec.number("rho_exponent");
  if (sec.has("gamma_exponent")) p.gamma_exponent = sec.number("gamma_exponent");
  if (sec.has("max_iters")) p.max_iters = sec.integer("max_iters");
  if (sec.has("tolerance")) p.tolerance = sec.number("tolerance");
  if (sec.has("patience")) p.patience = sec.integer("patience");
  if (sec.has("amplitude")) {
    const auto a = lower(sec.text("amplitude"));
    if (a == "relaxed") p.amplitude = AmplitudeMode::relaxed;
    else if (a == "unit") p.amplitude = AmplitudeMode::unit;
    else throw ConfigError("ssca.amplitude must be 'relaxed' or 'unit'");
  }
}

void parse_experiment_section(Section& sec, ExperimentSpec& spec) {
  if (sec.has("schemes")) {
    spec.schemes.clear();
    for (const auto& s : sec.get("schemes")) spec.schemes.push_back(parse_scheme(s.as<std::string>()));
  }
  if (sec.has("q")) {
    spec.resolutions.clear();
    const auto q = sec.get("q");
    if (q.IsSequence()) {
      for (const auto& x : q) spec.resolutions.push_back(parse_resolution(x.as<std::string>()));
    } else {
      spec.resolutions.push_back(parse_resolution(q.as<std::string>()));
    }
  }
  if (sec.has("slots")) spec.slots = sec.integer("slots");
  if (sec.has("trials")) spec.trials = sec.integer("trials");
  if (sec.has("full_scale") && sec.flag("full_scale")) {
    spec.slots = 2000;
    spec.trials = 2000;
  }
  if (sec.has("threads")) spec.threads = sec.integer("threads");
  if (sec.has("weights")) {
    const auto w = numbers(sec.get("weights"));
    spec.weights = Eigen::Map<const RVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  }
  if (sec.has("sweep")) {
    Section sw(sec.get("sweep"), "experiment.sweep");
    spec.sweep.variable = parse_sweep_variable(sw.text("variable"));
    spec.sweep.grid = numbers(sw.get("grid"));
    sw.reject_unknown();
  }
  if (sec.has("icsi_rounds")) spec.icsi.max_rounds = sec.integer("icsi_rounds");
}

}  // namespace

double parse_power(std::string_view text) {
  const auto [value, unit] = split_unit(text);
  if (unit == "dbm") return db_to_linear(value - 30.0);
  if (unit == "db") throw ConfigError("power needs dBm or watts, got '" + std::string(text) + "'");
  return value;
}

double parse_ratio(std::string_view text) {
  const auto [value, unit] = split_unit(text);
  if (unit == "db") return db_to_linear(value);
  if (unit == "dbm") throw ConfigError("ratio needs dB, got '" + std::string(text) + "'");
  return value;
}

double parse_rician(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "rayleigh") return 0.0;
  const auto [value, unit] = split_unit(t);
  if (unit == "db") return std::isinf(value) && value < 0.0 ? 0.0 : db_to_linear(value);
  if (unit == "dbm") throw ConfigError("Rician factor needs dB, got '" + std::string(text) + "'");
  if (value < 0.0) throw ConfigError("linear Rician factor must be >= 0");
  return value;
}

PhaseResolution parse_resolution(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "continuous") return PhaseResolution::continuous();
  const double q = parse_number(t);
  if (q < 1.0 || q != std::floor(q) || q > 16.0)
    throw ConfigError("phase resolution must be 'inf' or an integer number of bits in [1, 16]");
  return PhaseResolution::bits(static_cast<int>(q));
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

std::vector<Vec3> semicircle_users(const Vec3& center, double radius, int count) {
  if (count < 1) throw ConfigError("semicircle count must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("semicircle radius must be positive");
  std::vector<Vec3> out;
  for (int k = 1; k <= count; ++k) {
    const double theta = (k - 0.5) * kPi / count;
    out.push_back(center + Vec3(radius * std::sin(theta), -radius * std::cos(theta), 0.0));
  }
  return out;
}

ExperimentSpec parse_experiment(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML syntax: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (root.IsNull()) return spec;
    Section top(root, "<root>");
    if (top.has("seed")) spec.seed = parse_unsigned(top.text("seed"), "seed");
    if (top.has("scenario")) {
      Section sec(top.get("scenario"), "scenario");
      parse_scenario(sec, spec.scenario);
      sec.reject_unknown();
    }
    if (top.has("experiment")) {
      Section sec(top.get("experiment"), "experiment");
      parse_experiment_section(sec, spec);
      sec.reject_unknown();
    }
    if (top.has("pdd")) {
      Section sec(top.get("pdd"), "pdd");
      parse_pdd(sec, spec.pdd);
      sec.reject_unknown();
    }
    if (top.has("ssca")) {
      Section sec(top.get("ssca"), "ssca");
      parse_ssca(sec, spec.ssca);
      sec.reject_unknown();
    }
    spec.icsi.pdd = spec.pdd;
    top.reject_unknown();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad value: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_experiment(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_env_overrides(ExperimentSpec& spec) {
  if (const char* s = std::getenv("IRS_SEED"); s && *s) {
    spec.seed = parse_unsigned(s, "IRS_SEED");
  }
  if (const char* t = std::getenv("IRS_THREADS"); t && *t) {
    const std::uint64_t v = parse_unsigned(t, "IRS_THREADS");
    if (v > 4096) throw ConfigError("IRS_THREADS is too large");
    spec.threads = static_cast<int>(v);
  }
}

}  // namespace irs
