#include "snoise/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "snoise/error.hpp"

namespace snoise {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(int line, const std::string& what) {
  fail(ErrorCode::ConfigError, line > 0 ? "line " + std::to_string(line) + ": " + what : what);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    fail(ErrorCode::ConfigError, what + ": '" + s + "' is not a finite number");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::ConfigError, what + ": '" + s + "' is not a non-negative integer");
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.front() == '[') {
      if (line.back() != ']') config_error(line_no, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) config_error(line_no, "empty section name");
      if (doc.section_lines_.count(current)) config_error(line_no, "duplicate section [" + current + "]");
      doc.section_lines_[current] = line_no;
      doc.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(line_no, "expected 'key = value'");
    if (current.empty()) config_error(line_no, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(line_no, "empty key");
    auto& sec = doc.sections_[current];
    if (sec.count(key)) config_error(line_no, "duplicate key '" + key + "' in [" + current + "]");
    sec[key] = {value, line_no};
  }
  return doc;
}

IniDocument IniDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

bool IniDocument::has_section(const std::string& s) const { return sections_.count(s) > 0; }

const std::map<std::string, IniDocument::Entry>* IniDocument::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

int IniDocument::section_line(const std::string& name) const {
  const auto it = section_lines_.find(name);
  return it == section_lines_.end() ? 0 : it->second;
}

std::string_view scenario_name(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Simulate: return "simulate";
    case ScenarioKind::CfCompare: return "cf-compare";
    case ScenarioKind::MarkovTest: return "markov-test";
    case ScenarioKind::AffineValidate: return "affine-validate";
    case ScenarioKind::MeasureCheck: return "measure-check";
    case ScenarioKind::DriftCheck: return "drift-check";
  }
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) noexcept {
  for (auto k : {ScenarioKind::Simulate, ScenarioKind::CfCompare, ScenarioKind::MarkovTest,
                 ScenarioKind::AffineValidate, ScenarioKind::MeasureCheck, ScenarioKind::DriftCheck}) {
    if (scenario_name(k) == name) return k;
  }
  return std::nullopt;
}

RateCurve parse_rate(const std::string& text) {
  const auto w = words(text);
  if (w.empty()) fail(ErrorCode::ConfigError, "empty rate specification");
  if (w[0] == "constant" && w.size() == 2) return RateCurve::constant(to_double(w[1], "rate"));
  if (w[0] == "linear" && w.size() == 3) {
    return RateCurve::linear(to_double(w[1], "rate intercept"), to_double(w[2], "rate slope"));
  }
  if (w[0] == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& item : split(text.substr(text.find("table") + 5), ';')) {
      const auto kv = words(item);
      if (kv.size() != 2) fail(ErrorCode::ConfigError, "rate table entries are 't value' pairs");
      knots.emplace_back(to_double(kv[0], "rate table time"), to_double(kv[1], "rate table value"));
    }
    return RateCurve::table(std::move(knots));
  }
  if (w.size() == 1) return RateCurve::constant(to_double(w[0], "rate"));
  fail(ErrorCode::ConfigError,
       "rate must be 'constant L', 'linear A B' or 'table t v; t v; ...', got '" + text + "'");
}

MarksPtr parse_marks(const std::string& text) {
  const auto w = words(text);
  if (w.empty()) fail(ErrorCode::ConfigError, "empty mark specification");
  const auto& name = w[0];
  auto arg = [&](std::size_t i) { return to_double(w[i], "marks " + name); };
  if (name == "point_mass" && w.size() == 2) return point_mass(arg(1));
  if (name == "normal" && w.size() == 3) return normal_marks(arg(1), arg(2));
  if (name == "exponential" && w.size() == 2) return exponential_marks(arg(1));
  if (name == "uniform" && w.size() == 3) return uniform_marks(arg(1), arg(2));
  if (name == "discrete") {
    std::vector<double> values, probs;
    for (const auto& item : split(text.substr(text.find("discrete") + 8), ';')) {
      const auto kv = words(item);
      if (kv.size() != 2) fail(ErrorCode::ConfigError, "discrete marks are 'value prob' pairs");
      values.push_back(to_double(kv[0], "discrete value"));
      probs.push_back(to_double(kv[1], "discrete prob"));
    }
    return discrete_marks(std::move(values), std::move(probs));
  }
  fail(ErrorCode::ConfigError,
       "marks must be one of 'point_mass u', 'normal m s', 'exponential rate', 'uniform a b', "
       "'discrete v p; v p; ...', got '" +
           text + "'");
}

namespace {

// Pulls keys from one section, records the resolved value and rejects
// leftovers (typos) at the end.
class SectionReader {
 public:
  SectionReader(const IniDocument& doc, std::string name, std::ostringstream& resolved)
      : name_(std::move(name)), entries_(doc.section(name_)), resolved_(resolved) {
    resolved_ << "[" << name_ << "]\n";
  }

  bool present() const { return entries_ != nullptr; }

  std::optional<IniDocument::Entry> get(const std::string& key) {
    used_.insert(key);
    if (!entries_) return std::nullopt;
    const auto it = entries_->find(key);
    if (it == entries_->end()) return std::nullopt;
    return it->second;
  }

  const IniDocument::Entry& require(const std::string& key) {
    used_.insert(key);
    const auto it = entries_ ? entries_->find(key) : decltype(entries_->find(key)){};
    if (!entries_ || it == entries_->end()) {
      fail(ErrorCode::ConfigError, "missing required key '" + key + "' in [" + name_ + "]");
    }
    return it->second;
  }

  template <class F>
  auto convert(const IniDocument::Entry& e, const std::string& key, F&& f) {
    try {
      return f(e.value);
    } catch (const Error& err) {
      config_error(e.line, "[" + name_ + "] " + key + ": " + err.what());
    }
  }

  double number(const std::string& key, double fallback) {
    const auto e = get(key);
    const double v = e ? convert(*e, key, [&](const std::string& s) { return to_double(s, key); })
                       : fallback;
    record(key, fmt(v));
    return v;
  }
  double number(const std::string& key) {
    const auto& e = require(key);
    const double v = convert(e, key, [&](const std::string& s) { return to_double(s, key); });
    record(key, fmt(v));
    return v;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    const auto e = get(key);
    const auto v = e ? convert(*e, key, [&](const std::string& s) { return to_u64(s, key); })
                     : fallback;
    record(key, std::to_string(v));
    return v;
  }
  bool boolean(const std::string& key, bool fallback) {
    const auto e = get(key);
    bool v = fallback;
    if (e) {
      if (e->value != "true" && e->value != "false") {
        config_error(e->line, "[" + name_ + "] " + key + " must be true or false");
      }
      v = e->value == "true";
    }
    record(key, v ? "true" : "false");
    return v;
  }
  std::string text(const std::string& key) {
    const auto& e = require(key);
    record(key, e.value);
    return e.value;
  }
  std::optional<std::string> text_opt(const std::string& key) {
    const auto e = get(key);
    if (e) record(key, e->value);
    return e ? std::optional<std::string>(e->value) : std::nullopt;
  }
  int line_of(const std::string& key) const {
    if (!entries_) return 0;
    const auto it = entries_->find(key);
    return it == entries_->end() ? 0 : it->second.line;
  }
  void record(const std::string& key, const std::string& value) {
    resolved_ << key << " = " << value << "\n";
  }
  void finish() {
    if (entries_) {
      for (const auto& [key, entry] : *entries_) {
        if (!used_.count(key)) config_error(entry.line, "unknown key '" + key + "' in [" + name_ + "]");
      }
    }
    resolved_ << "\n";
  }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const std::map<std::string, IniDocument::Entry>* entries_;
  std::ostringstream& resolved_;
  std::set<std::string> used_;
};

std::vector<double> parse_theta(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) fail(ErrorCode::ConfigError, "theta range is 'start:stop:count'");
    const auto n = to_u64(parts[2], "theta count");
    if (n < 1) fail(ErrorCode::ConfigError, "theta count must be >= 1");
    return uniform_grid(to_double(parts[0], "theta start"), to_double(parts[1], "theta stop"), n);
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(to_double(p, "theta"));
  if (out.empty()) fail(ErrorCode::ConfigError, "theta list is empty");
  return out;
}

NoiseKernel parse_kernel(SectionReader& r) {
  const auto kind = r.text("kind");
  if (kind == "jump_to_level") return NoiseKernel::jump_to_level();
  if (kind == "exponential") return NoiseKernel::exponential(r.number("a", 1.0), r.number("b"));
  if (kind == "power_law") return NoiseKernel::power_law(r.number("c"));
  if (kind == "random_decay") return NoiseKernel::random_decay();
  if (kind == "table") {
    const auto& e = r.require("table");
    r.record("table", e.value);
    return r.convert(e, "table", [](const std::string& s) {
      std::vector<NoiseKernel::TablePoint> pts;
      for (const auto& item : split(s, ';')) {
        const auto v = words(item);
        if (v.size() != 3) fail(ErrorCode::ConfigError, "kernel table entries are 't x G' triples");
        pts.push_back({to_double(v[0], "t"), to_double(v[1], "x"), to_double(v[2], "G")});
      }
      return NoiseKernel::table(pts);
    });
  }
  config_error(r.line_of("kind"),
               "[kernel] kind must be jump_to_level, exponential, power_law, random_decay or table");
}

}  // namespace

ExperimentConfig build_config(const IniDocument& doc, const ConfigOverrides& overrides) {
  static const std::set<std::string> known{"run", "kernel", "markov", "compensator",
                                           "market", "measure", "affine"};
  for (const auto& [name, _] : doc.sections()) {
    if (!known.count(name)) config_error(doc.section_line(name), "unknown section [" + name + "]");
  }
  if (!doc.has_section("run")) fail(ErrorCode::ConfigError, "missing required section [run]");

  ExperimentConfig cfg;
  std::ostringstream resolved;

  SectionReader run(doc, "run", resolved);
  {
    const auto declared = run.get("scenario");
    std::optional<ScenarioKind> kind;
    if (declared) {
      kind = parse_scenario(declared->value);
      if (!kind) config_error(declared->line, "[run] scenario: unknown scenario '" + declared->value + "'");
    }
    if (overrides.scenario) {
      if (kind && *kind != *overrides.scenario) {
        config_error(declared->line, "[run] scenario '" + declared->value +
                                         "' does not match subcommand '" +
                                         std::string(scenario_name(*overrides.scenario)) + "'");
      }
      kind = overrides.scenario;
    }
    if (!kind) fail(ErrorCode::ConfigError, "missing required key 'scenario' in [run]");
    cfg.scenario = *kind;
    run.record("scenario", std::string(scenario_name(*kind)));
  }
  if (overrides.seed) {
    run.get("seed");
    cfg.run.seed = *overrides.seed;
    run.record("seed", std::to_string(cfg.run.seed));
  } else {
    const auto& e = run.require("seed");
    cfg.run.seed = run.convert(e, "seed", [](const std::string& s) { return to_u64(s, "seed"); });
    run.record("seed", std::to_string(cfg.run.seed));
  }
  if (overrides.n_paths) {
    run.get("n_paths");
    cfg.run.n_paths = *overrides.n_paths;
    run.record("n_paths", std::to_string(cfg.run.n_paths));
  } else {
    cfg.run.n_paths = run.integer("n_paths", cfg.run.n_paths);
  }
  cfg.run.horizon = run.number("horizon", cfg.run.horizon);
  cfg.run.grid_points = run.integer("grid_points", cfg.run.grid_points);
  cfg.run.quad_tol = run.number("quad_tol", cfg.run.quad_tol);
  cfg.run.csv_paths = run.integer("csv_paths", cfg.run.csv_paths);
  cfg.run.negative_control = run.boolean("negative_control", cfg.run.negative_control);
  if (const auto th = run.get("theta")) {
    cfg.run.theta = run.convert(*th, "theta", parse_theta);
  }
  {
    std::string list;
    for (std::size_t i = 0; i < cfg.run.theta.size(); ++i) list += (i ? ", " : "") + fmt(cfg.run.theta[i]);
    run.record("theta", list);
  }
  if (!(cfg.run.horizon > 0.0)) config_error(run.line_of("horizon"), "[run] horizon must be > 0");
  if (cfg.run.n_paths < 1) config_error(run.line_of("n_paths"), "[run] n_paths must be >= 1");
  if (cfg.run.grid_points < 2) config_error(run.line_of("grid_points"), "[run] grid_points must be >= 2");
  if (!(cfg.run.quad_tol > 0.0)) config_error(run.line_of("quad_tol"), "[run] quad_tol must be > 0");
  run.finish();

  if (doc.has_section("kernel")) {
    SectionReader r(doc, "kernel", resolved);
    cfg.kernel = parse_kernel(r);
    r.finish();
  }
  if (doc.has_section("markov")) {
    SectionReader r(doc, "markov", resolved);
    cfg.markov.grid_points = r.integer("grid_points", cfg.markov.grid_points);
    cfg.markov.grid_end = r.number("grid_end", cfg.markov.grid_end);
    cfg.markov.tol = r.number("tol", cfg.markov.tol);
    if (r.line_of("expect")) cfg.markov.expect = r.boolean("expect", false);
    r.finish();
  }
  if (doc.has_section("compensator")) {
    SectionReader r(doc, "compensator", resolved);
    const auto& rate_e = r.require("rate");
    auto rate = r.convert(rate_e, "rate", parse_rate);
    r.record("rate", rate_e.value);
    std::vector<MarksPtr> parts;
    const auto& marks_e = r.require("marks");
    parts.push_back(r.convert(marks_e, "marks", parse_marks));
    r.record("marks", marks_e.value);
    for (int k = 2;; ++k) {
      const std::string key = "marks." + std::to_string(k);
      const auto e = r.get(key);
      if (!e) break;
      parts.push_back(r.convert(*e, key, parse_marks));
      r.record(key, e->value);
    }
    MarksPtr marks = parts.size() == 1 ? parts[0] : product_marks(parts);
    const double probe_max = rate.max_on(0.0, cfg.run.horizon);
    const double bound = r.number("rate_bound", probe_max > 0.0 ? probe_max : 1.0);
    if (rate.min_on(0.0, cfg.run.horizon) < 0.0) {
      config_error(rate_e.line, "[compensator] rate is negative on [0, horizon]");
    }
    cfg.compensator = r.convert(rate_e, "rate_bound", [&](const std::string&) {
      return CompensatorSpec(rate, bound, marks);
    });
    r.finish();
  }
  if (doc.has_section("market")) {
    SectionReader r(doc, "market", resolved);
    if (!cfg.kernel || !cfg.compensator) {
      config_error(doc.section_line("market"), "[market] needs [kernel] and [compensator]");
    }
    MarketParams m{};
    m.x0 = r.number("x0", 1.0);
    m.mu = r.number("mu");
    m.sigma = r.number("sigma");
    if (const auto e = r.get("rate_curve")) {
      m.short_rate = r.convert(*e, "rate_curve", parse_rate);
      r.record("rate_curve", e->value);
    } else {
      r.record("rate_curve", "constant 0");
    }
    m.kernel = *cfg.kernel;
    m.spec = *cfg.compensator;
    r.convert(IniDocument::Entry{"", doc.section_line("market")}, "market",
              [&](const std::string&) {
                m.validate();
                return 0;
              });
    cfg.market = m;
    r.finish();
  }
  if (doc.has_section("measure")) {
    SectionReader r(doc, "measure", resolved);
    if (!cfg.compensator) config_error(doc.section_line("measure"), "[measure] needs [compensator]");
    const double lp = r.number("lambda_prime");
    const auto eta = r.text_opt("eta").value_or("one");
    const auto w = words(eta);
    const auto& eta_line = r.line_of("eta");
    cfg.measure = r.convert(IniDocument::Entry{eta, eta_line}, "eta", [&](const std::string&) {
      if (w.size() == 1 && w[0] == "one") return MartingaleMeasureSpec::rate_change(*cfg.compensator, lp);
      if (w.size() == 2 && w[0] == "tilt") {
        return MartingaleMeasureSpec::exponential_tilt(*cfg.compensator, lp, to_double(w[1], "tilt"));
      }
      fail(ErrorCode::ConfigError, "eta must be 'one' or 'tilt h'");
    });
    if (!r.line_of("eta")) r.record("eta", eta);
    r.finish();
  }
  if (doc.has_section("affine")) {
    SectionReader r(doc, "affine", resolved);
    HawkesParams p;
    p.kappa = r.number("kappa");
    p.theta_bar = r.number("theta_bar", 0.0);
    p.lambda0 = r.number("lambda0", 0.0);
    r.convert(IniDocument::Entry{"", doc.section_line("affine")}, "affine", [&](const std::string&) {
      p.validate();
      return 0;
    });
    cfg.affine = p;
    r.finish();
  }

  auto need = [&](bool ok, const char* block) {
    if (!ok) {
      fail(ErrorCode::ConfigError, std::string("scenario '") +
                                       std::string(scenario_name(cfg.scenario)) +
                                       "' needs section [" + block + "]");
    }
  };
  switch (cfg.scenario) {
    case ScenarioKind::Simulate:
    case ScenarioKind::CfCompare:
      need(cfg.kernel.has_value(), "kernel");
      need(cfg.compensator.has_value(), "compensator");
      break;
    case ScenarioKind::MarkovTest:
      need(cfg.kernel.has_value(), "kernel");
      break;
    case ScenarioKind::AffineValidate:
      need(cfg.affine.has_value(), "affine");
      break;
    case ScenarioKind::MeasureCheck:
      need(cfg.compensator.has_value(), "compensator");
      need(cfg.measure.has_value(), "measure");
      break;
    case ScenarioKind::DriftCheck:
      need(cfg.market.has_value(), "market");
      need(cfg.measure.has_value(), "measure");
      break;
  }
  if (cfg.kernel && cfg.compensator && cfg.kernel->mark_dim() != cfg.compensator->mark_dim()) {
    fail(ErrorCode::ConfigError, "[kernel] mark dimension " + std::to_string(cfg.kernel->mark_dim()) +
                                     " does not match [compensator] marks dimension " +
                                     std::to_string(cfg.compensator->mark_dim()));
  }
  cfg.resolved = resolved.str();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  return build_config(IniDocument::load(path), overrides);
}

}  // namespace snoise
