#include "gwr/scenario.hpp"

#include "gwr/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace gwr {

using nlohmann::json;

std::optional<double> Experiment::number(const std::string& key) const {
  auto it = parameters.find(key);
  if (it == parameters.end()) return std::nullopt;
  const json v = json::parse(it->second);
  if (!v.is_number()) return std::nullopt;
  return v.get<double>();
}

std::optional<std::string> Experiment::text(const std::string& key) const {
  auto it = parameters.find(key);
  if (it == parameters.end()) return std::nullopt;
  const json v = json::parse(it->second);
  if (v.is_string()) return v.get<std::string>();
  return it->second;
}

namespace {

// Maps JSON pointers to the line where their value starts. Runs only on text
// that already parsed, so it can be forgiving.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : s_(text) {
    value("");
  }

  int line_of(std::string path) const {
    while (true) {
      auto it = lines_.find(path);
      if (it != lines_.end()) return it->second;
      if (path.empty()) return 1;
      path = path.substr(0, path.rfind('/'));
    }
  }

 private:
  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string str() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') ++pos_;
      if (pos_ < s_.size()) out += s_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& path) {
    ws();
    if (pos_ >= s_.size()) return;
    lines_.emplace(path, line_);
    const char c = s_[pos_];
    if (c == '{') {
      ++pos_;
      ws();
      while (pos_ < s_.size() && s_[pos_] != '}') {
        const std::string key = str();
        ws();
        ++pos_;  // ':'
        value(path + "/" + key);
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
        ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      ws();
      int idx = 0;
      while (pos_ < s_.size() && s_[pos_] != ']') {
        value(path + "/" + std::to_string(idx++));
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
        ws();
      }
      ++pos_;
    } else if (c == '"') {
      str();
    } else {
      while (pos_ < s_.size() && std::string(",]} \t\r\n").find(s_[pos_]) == std::string::npos) {
        ++pos_;
      }
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  Reader(const std::string& text, const ParseOptions& opt) : index_(text), opt_(opt) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    const int line = index_.line_of(path);
    const std::string where = path.empty() ? std::string("document") : path.substr(1);
    throw ParseError("line " + std::to_string(line) + ": " + where + ": " + msg, line);
  }

  void check_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed, std::vector<std::string>& warnings) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (allowed.count(it.key())) continue;
      const std::string p = path + "/" + it.key();
      if (opt_.strict) fail(p, "unknown key '" + it.key() + "'");
      warnings.push_back("line " + std::to_string(index_.line_of(p)) + ": unknown key '" +
                         p.substr(1) + "' ignored");
    }
  }

  const json& require(const json& obj, const std::string& path, const std::string& key) const {
    if (!obj.contains(key)) fail(path, "missing required key '" + key + "'");
    return obj.at(key);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  long long integer(const json& v, const std::string& path) const {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && std::floor(x) == x) return static_cast<long long>(x);
    }
    fail(path, "expected an integer");
  }

  int vertex(const json& v, const std::string& path, int n) const {
    const long long k = integer(v, path);
    if (k < 1 || k > n) {
      fail(path, "vertex index " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    return static_cast<int>(k - 1);
  }

  const LineIndex& index() const { return index_; }

 private:
  LineIndex index_;
  ParseOptions opt_;
};

Configuration read_points(const Reader& r, const json& v, const std::string& path, int d) {
  if (!v.is_array()) r.fail(path, "expected a list of coordinate lists");
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != d) {
      r.fail(p, "expected " + std::to_string(d) + " coordinates");
    }
    std::vector<double> pt;
    for (std::size_t c = 0; c < v[i].size(); ++c) {
      pt.push_back(r.number(v[i][c], p + "/" + std::to_string(c)));
    }
    pts.push_back(std::move(pt));
  }
  return Configuration(d, pts);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t k = 0; k + 1 < end; ++k) {
      if (text[k] == '\n') ++line;
    }
    throw ParseError("line " + std::to_string(line) + ": malformed JSON: " + e.what(), line);
  }

  Reader r(text, options);
  Scenario sc;
  if (!doc.is_object()) r.fail("", "top level must be an object");
  r.check_keys(doc, "",
               {"name", "description", "dimension", "agents", "edges", "angles", "sim",
                "experiment", "desired"},
               sc.warnings);

  if (doc.contains("name")) {
    if (!doc["name"].is_string()) r.fail("/name", "expected a string");
    sc.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) r.fail("/description", "expected a string");
    sc.description = doc["description"].get<std::string>();
  }

  const long long d = r.integer(r.require(doc, "", "dimension"), "/dimension");
  if (d != 2 && d != 3) r.fail("/dimension", "dimension must be 2 or 3");
  sc.spec.d = static_cast<int>(d);

  sc.initial = read_points(r, r.require(doc, "", "agents"), "/agents", sc.spec.d);
  sc.spec.n = sc.initial.size();
  const int n = sc.spec.n;

  if (doc.contains("edges")) {
    const json& edges = doc["edges"];
    if (!edges.is_array()) r.fail("/edges", "expected a list");
    for (std::size_t g = 0; g < edges.size(); ++g) {
      const std::string p = "/edges/" + std::to_string(g);
      const json& e = edges[g];
      if (!e.is_object()) r.fail(p, "expected an object {i, j, target_sq}");
      r.check_keys(e, p, {"i", "j", "target_sq"}, sc.warnings);
      DistanceConstraint c;
      c.i = r.vertex(r.require(e, p, "i"), p + "/i", n);
      c.j = r.vertex(r.require(e, p, "j"), p + "/j", n);
      c.target_sq = r.number(r.require(e, p, "target_sq"), p + "/target_sq");
      sc.spec.edges.push_back(c);
    }
  }

  if (doc.contains("angles")) {
    const json& angles = doc["angles"];
    if (!angles.is_array()) r.fail("/angles", "expected a list");
    for (std::size_t h = 0; h < angles.size(); ++h) {
      const std::string p = "/angles/" + std::to_string(h);
      const json& a = angles[h];
      if (!a.is_object()) r.fail(p, "expected an object {apex, i, j, target_cos|target_deg}");
      r.check_keys(a, p, {"apex", "i", "j", "target_cos", "target_deg"}, sc.warnings);
      AngleConstraint c;
      c.apex = r.vertex(r.require(a, p, "apex"), p + "/apex", n);
      c.i = r.vertex(r.require(a, p, "i"), p + "/i", n);
      c.j = r.vertex(r.require(a, p, "j"), p + "/j", n);
      const bool has_cos = a.contains("target_cos");
      const bool has_deg = a.contains("target_deg");
      if (has_cos == has_deg) r.fail(p, "give exactly one of target_cos and target_deg");
      if (has_cos) {
        c.target_cos = r.number(a["target_cos"], p + "/target_cos");
      } else {
        const double deg = r.number(a["target_deg"], p + "/target_deg");
        c.target_cos = std::cos(deg * M_PI / 180.0);
      }
      sc.spec.angles.push_back(c);
    }
  }

  if (doc.contains("desired")) {
    sc.desired = read_points(r, doc["desired"], "/desired", sc.spec.d);
    if (sc.desired->size() != n) r.fail("/desired", "must list the same number of agents");
  }

  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    if (!s.is_object()) r.fail("/sim", "expected an object");
    r.check_keys(s, "/sim",
                 {"dt", "t_max", "err_tol", "grad_tol", "gain_dist", "gain_angle", "seed",
                  "integrator", "record_every", "eps_sep", "track_rw_rank"},
                 sc.warnings);
    auto num = [&](const char* key, double& dst) {
      if (s.contains(key)) dst = r.number(s[key], std::string("/sim/") + key);
    };
    num("dt", sc.sim.dt);
    num("t_max", sc.sim.t_max);
    num("err_tol", sc.sim.err_tol);
    num("grad_tol", sc.sim.grad_tol);
    num("gain_dist", sc.sim.gains.dist);
    num("gain_angle", sc.sim.gains.angle);
    num("eps_sep", sc.sim.eps_sep);
    if (s.contains("seed")) {
      const long long seed = r.integer(s["seed"], "/sim/seed");
      if (seed < 0) r.fail("/sim/seed", "seed must be non-negative");
      sc.seed = static_cast<std::uint64_t>(seed);
    }
    if (s.contains("record_every")) {
      sc.sim.record_every = static_cast<int>(r.integer(s["record_every"], "/sim/record_every"));
    }
    if (s.contains("integrator")) {
      if (!s["integrator"].is_string()) r.fail("/sim/integrator", "expected a string");
      try {
        sc.sim.integrator = parse_integrator(s["integrator"].get<std::string>());
      } catch (const InvalidArgument& e) {
        r.fail("/sim/integrator", e.what());
      }
    }
    if (s.contains("track_rw_rank")) {
      if (!s["track_rw_rank"].is_boolean()) r.fail("/sim/track_rw_rank", "expected a boolean");
      sc.sim.track_rw_rank = s["track_rw_rank"].get<bool>();
    }
    try {
      sc.sim.check();
    } catch (const InvalidArgument& e) {
      r.fail("/sim", e.what());
    }
  }

  if (doc.contains("experiment")) {
    const json& ex = doc["experiment"];
    if (!ex.is_object()) r.fail("/experiment", "expected an object");
    r.check_keys(ex, "/experiment", {"type", "parameters"}, sc.warnings);
    Experiment e;
    const json& type = r.require(ex, "/experiment", "type");
    if (!type.is_string()) r.fail("/experiment/type", "expected a string");
    e.type = type.get<std::string>();
    static const std::set<std::string> kinds{"analyze", "simulate", "montecarlo",
                                             "check-gradient", "equilibrium"};
    if (!kinds.count(e.type)) r.fail("/experiment/type", "unknown experiment type '" + e.type + "'");
    if (ex.contains("parameters")) {
      if (!ex["parameters"].is_object()) r.fail("/experiment/parameters", "expected an object");
      for (auto it = ex["parameters"].begin(); it != ex["parameters"].end(); ++it) {
        e.parameters[it.key()] = it.value().dump();
      }
    }
    sc.experiment = std::move(e);
  }

  const ValidationReport rep = validate(sc.spec);
  if (!rep.ok()) {
    const Violation& v = rep.violations.front();
    std::string msg = v.code + ": " + v.message;
    if (rep.violations.size() > 1) {
      msg += " (and " + std::to_string(rep.violations.size() - 1) + " more)";
    }
    r.fail(v.location.empty() ? std::string() : "/" + v.location, msg);
  }
  try {
    require_separated(sc.spec, sc.initial, sc.sim.eps_sep);
  } catch (const DegenerateConfiguration& e) {
    r.fail("/agents", e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.what(), e.line());
  }
}

double formation_diameter(const Configuration& cfg) {
  double best = 0.0;
  for (int a = 0; a < cfg.size(); ++a) {
    for (int b = a + 1; b < cfg.size(); ++b) {
      best = std::max(best, (cfg.point(a) - cfg.point(b)).norm());
    }
  }
  return best;
}

Configuration perturbed(const Configuration& cfg, double fraction, std::uint64_t seed) {
  if (fraction < 0.0) throw InvalidArgument("perturbation fraction must be non-negative");
  const double radius = fraction * formation_diameter(cfg);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Configuration out = cfg;
  const int d = cfg.dim();
  for (int i = 0; i < cfg.size(); ++i) {
    Eigen::VectorXd dir(d);
    for (int c = 0; c < d; ++c) dir[c] = gauss(rng);
    const double r = radius * std::pow(unit(rng), 1.0 / d);
    out.point(i) += r * dir.normalized();
  }
  return out;
}

}  // namespace gwr
