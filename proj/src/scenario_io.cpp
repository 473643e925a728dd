#include "gasphs/scenario_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "gasphs/constants.hpp"

namespace gasphs {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

ScenarioError::ScenarioError(const std::string& source, std::string path, std::optional<int> line,
                             const std::string& message)
    : InvalidInput(source + (line ? ":" + std::to_string(*line) : std::string()) + ": " +
                   (path.empty() ? std::string() : path + ": ") + message),
      path_(std::move(path)),
      line_(line) {}

namespace {

std::string escape_pointer_token(std::string_view key) {
  std::string out;
  for (const char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

/// Maps JSON pointers to the line on which the member or element starts.
class LineLocator {
public:
  explicit LineLocator(std::string_view text) : s_(text) {
    try {
      value("");
    } catch (...) {
      // malformed input: keep what was located so far
    }
  }

  std::optional<int> line(std::string pointer) const {
    while (true) {
      const auto it = lines_.find(pointer);
      if (it != lines_.end()) return it->second;
      if (pointer.empty()) return std::nullopt;
      pointer.erase(pointer.rfind('/'));
    }
  }

  static int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
  }

private:
  struct Malformed {};

  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r' || s_[i_] == '\n')) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  char peek() {
    if (i_ >= s_.size()) throw Malformed{};
    return s_[i_];
  }

  std::string string() {
    if (peek() != '"') throw Malformed{};
    ++i_;
    std::string out;
    while (peek() != '"') {
      if (s_[i_] == '\\') {
        ++i_;
        out += peek();
      } else {
        out += s_[i_];
      }
      ++i_;
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    ws();
    lines_.emplace(path, line_);
    const char c = peek();
    if (c == '{') {
      ++i_;
      ws();
      if (peek() == '}') {
        ++i_;
        return;
      }
      while (true) {
        ws();
        const std::string member = path + "/" + escape_pointer_token(string());
        lines_.emplace(member, line_);
        ws();
        if (peek() != ':') throw Malformed{};
        ++i_;
        value(member);
        ws();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        if (peek() != '}') throw Malformed{};
        ++i_;
        return;
      }
    }
    if (c == '[') {
      ++i_;
      ws();
      if (peek() == ']') {
        ++i_;
        return;
      }
      for (int index = 0;; ++index) {
        value(path + "/" + std::to_string(index));
        ws();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        if (peek() != ']') throw Malformed{};
        ++i_;
        return;
      }
    }
    if (c == '"') {
      string();
      return;
    }
    while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos) ++i_;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::unordered_map<std::string, int> lines_;
};

struct Unit {
  const char* suffix;
  double scale;
  double divisor = 1.0;
  double offset = 0.0;
};

constexpr std::array kPressureUnits = {Unit{"Pa", 1.0}, Unit{"kPa", 1e3}, Unit{"bar", units::kPaPerBar},
                                       Unit{"MPa", 1e6}};
constexpr std::array kLengthUnits = {Unit{"m", 1.0}, Unit{"km", units::kMetersPerKm}, Unit{"mm", units::kMetersPerMm}};
constexpr std::array kTemperatureUnits = {Unit{"K", 1.0}, Unit{"C", 1.0, 1.0, units::kKelvinOffset}};
constexpr std::array kTimeUnits = {Unit{"s", 1.0}, Unit{"min", units::kSecondsPerMinute},
                                   Unit{"h", units::kSecondsPerHour}};
constexpr std::array kFlowUnits = {Unit{"m3_per_s", 1.0}, Unit{"m3_per_h", 1.0, units::kSecondsPerHour}};
constexpr std::array kGasConstantUnits = {Unit{"J_per_kgK", 1.0}};
constexpr std::array kViscosityUnits = {Unit{"Pa_s", 1.0}};

class Reader {
public:
  Reader(std::string source, std::string_view text, std::string prefix)
      : source_(std::move(source)), locator_(text), prefix_(std::move(prefix)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const std::string full = prefix_ + path;
    throw ScenarioError(source_, full.empty() ? "/" : full, locator_.line(full), message);
  }

  void check_keys(const Json& obj, const std::string& path, const std::vector<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(path + "/" + escape_pointer_token(key), "unknown key '" + key + "'");
      }
    }
  }

  template <std::size_t N>
  static void allow_quantity(std::vector<std::string>& keys, std::string_view base, const std::array<Unit, N>& units) {
    for (const auto& u : units) keys.push_back(std::string(base) + "_" + u.suffix);
  }

  template <std::size_t N>
  std::optional<double> quantity(const Json& obj, const std::string& path, std::string_view base,
                                 const std::array<Unit, N>& units) const {
    std::optional<double> out;
    std::string found;
    for (const auto& u : units) {
      const std::string key = std::string(base) + "_" + u.suffix;
      const auto it = obj.find(key);
      if (it == obj.end()) continue;
      if (!found.empty()) fail(path + "/" + key, "'" + key + "' conflicts with '" + found + "'");
      found = key;
      if (!it->is_number()) fail(path + "/" + key, "expected a number");
      out = it->get<double>() * u.scale / u.divisor + u.offset;
    }
    return out;
  }

  template <std::size_t N>
  double required_quantity(const Json& obj, const std::string& path, std::string_view base,
                           const std::array<Unit, N>& units) const {
    const auto v = quantity(obj, path, base, units);
    if (!v) {
      std::string options;
      for (const auto& u : units) options += (options.empty() ? "" : "|") + std::string(u.suffix);
      fail(path, "missing '" + std::string(base) + "_<" + options + ">'");
    }
    return *v;
  }

  std::optional<double> number(const Json& obj, const std::string& path, const std::string& key) const {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_number()) fail(path + "/" + key, "expected a number");
    return it->get<double>();
  }

  std::optional<std::string> string(const Json& obj, const std::string& path, const std::string& key) const {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) fail(path + "/" + key, "expected a string");
    return it->get<std::string>();
  }

  std::string required_string(const Json& obj, const std::string& path, const std::string& key) const {
    auto v = string(obj, path, key);
    if (!v) fail(path, "missing '" + key + "'");
    return *v;
  }

  template <std::size_t N>
  std::optional<std::vector<double>> quantity_array(const Json& obj, const std::string& path, std::string_view base,
                                                    const std::array<Unit, N>& units) const {
    std::optional<std::vector<double>> out;
    for (const auto& u : units) {
      const std::string key = std::string(base) + "_" + u.suffix;
      const auto it = obj.find(key);
      if (it == obj.end()) continue;
      if (out) fail(path + "/" + key, "conflicting units for '" + std::string(base) + "'");
      if (!it->is_array()) fail(path + "/" + key, "expected an array of numbers");
      std::vector<double> values;
      for (std::size_t k = 0; k < it->size(); ++k) {
        if (!(*it)[k].is_number()) fail(path + "/" + key + "/" + std::to_string(k), "expected a number");
        values.push_back((*it)[k].get<double>() * u.scale / u.divisor + u.offset);
      }
      out = std::move(values);
    }
    return out;
  }

private:
  std::string source_;
  LineLocator locator_;
  std::string prefix_;
};

GasProperties read_gas(const Reader& r, const Json& root, std::vector<std::string>& defaults) {
  GasProperties gas = GasProperties::natural_gas();
  const auto it = root.find("gas");
  if (it == root.end()) {
    defaults.emplace_back("gas");
    return gas;
  }
  const std::string path = "/gas";
  std::vector<std::string> keys;
  Reader::allow_quantity(keys, "R", kGasConstantUnits);
  Reader::allow_quantity(keys, "mu", kViscosityUnits);
  Reader::allow_quantity(keys, "pc", kPressureUnits);
  Reader::allow_quantity(keys, "pn", kPressureUnits);
  Reader::allow_quantity(keys, "Tc", kTemperatureUnits);
  Reader::allow_quantity(keys, "Tn", kTemperatureUnits);
  Reader::allow_quantity(keys, "T", kTemperatureUnits);
  r.check_keys(*it, path, keys);

  auto field = [&](double& target, std::string_view base, const auto& units) {
    if (const auto v = r.quantity(*it, path, base, units)) target = *v;
    else defaults.push_back("gas." + std::string(base));
  };
  field(gas.specific_gas_constant, "R", kGasConstantUnits);
  field(gas.dynamic_viscosity, "mu", kViscosityUnits);
  field(gas.critical_pressure, "pc", kPressureUnits);
  field(gas.standard_pressure, "pn", kPressureUnits);
  field(gas.critical_temperature, "Tc", kTemperatureUnits);
  field(gas.standard_temperature, "Tn", kTemperatureUnits);
  field(gas.operating_temperature, "T", kTemperatureUnits);
  try {
    gas.validate();
  } catch (const InvalidInput& err) {
    r.fail(path, err.what());
  }
  return gas;
}

LoadProfile read_load(const Reader& r, const Json& node, const std::string& path) {
  const auto constant = r.quantity(node, path, "load_qn", kFlowUnits);
  const auto it = node.find("load_profile");
  if (constant && it != node.end()) r.fail(path + "/load_profile", "give either a constant load or a profile");
  if (constant) return LoadProfile::constant(*constant);
  if (it == node.end()) return {};
  const std::string ppath = path + "/load_profile";
  std::vector<std::string> keys;
  Reader::allow_quantity(keys, "t", kTimeUnits);
  Reader::allow_quantity(keys, "qn", kFlowUnits);
  r.check_keys(*it, ppath, keys);
  auto t = r.quantity_array(*it, ppath, "t", kTimeUnits);
  auto q = r.quantity_array(*it, ppath, "qn", kFlowUnits);
  if (!t || !q) r.fail(ppath, "load profile needs 't_<s|min|h>' and 'qn_<m3_per_s|m3_per_h>' arrays");
  try {
    return LoadProfile(std::move(*t), std::move(*q));
  } catch (const InvalidInput& err) {
    r.fail(ppath, err.what());
  }
}

void read_sim(const Reader& r, const Json& root, Scenario& s) {
  const auto it = root.find("sim");
  if (it == root.end()) r.fail("", "missing 'sim' section");
  const std::string path = "/sim";
  std::vector<std::string> keys = {"rtol", "atol", "method", "model_variant", "friction", "transition_width",
                                   "compressibility", "max_steps"};
  Reader::allow_quantity(keys, "t_start", kTimeUnits);
  Reader::allow_quantity(keys, "t_end", kTimeUnits);
  Reader::allow_quantity(keys, "sample_dt", kTimeUnits);
  Reader::allow_quantity(keys, "max_step", kTimeUnits);
  Reader::allow_quantity(keys, "initial_step", kTimeUnits);
  Reader::allow_quantity(keys, "z_ref_pressure", kPressureUnits);
  r.check_keys(*it, path, keys);

  SimSettings& sim = s.sim;
  sim.t_start = r.quantity(*it, path, "t_start", kTimeUnits).value_or(0.0);
  sim.t_end = r.required_quantity(*it, path, "t_end", kTimeUnits);
  if (const auto dt = r.quantity(*it, path, "sample_dt", kTimeUnits)) {
    sim.sample_dt = *dt;
  } else {
    sim.sample_dt = (sim.t_end - sim.t_start) / 1000.0;
    s.defaults_used.emplace_back("sim.sample_dt");
  }
  if (const auto v = r.number(*it, path, "rtol")) sim.solver.rtol = *v;
  else s.defaults_used.emplace_back("sim.rtol");
  if (const auto v = r.number(*it, path, "atol")) sim.solver.atol = *v;
  else s.defaults_used.emplace_back("sim.atol");
  if (const auto v = r.quantity(*it, path, "max_step", kTimeUnits)) sim.solver.max_step = *v;
  if (const auto v = r.quantity(*it, path, "initial_step", kTimeUnits)) sim.solver.initial_step = *v;
  if (const auto v = r.number(*it, path, "max_steps")) {
    if (!(*v >= 1.0)) r.fail(path + "/max_steps", "must be at least 1");
    sim.solver.max_steps = static_cast<std::size_t>(*v);
  }
  if (const auto m = r.string(*it, path, "method")) {
    if (*m == "rk45" || *m == "dopri5") sim.solver.method = OdeMethod::kDormandPrince45;
    else if (*m == "trapezoidal") sim.solver.method = OdeMethod::kImplicitTrapezoidal;
    else r.fail(path + "/method", "unknown method '" + *m + "' (rk45, trapezoidal)");
  }
  if (const auto m = r.string(*it, path, "model_variant")) {
    if (*m == "phs") sim.variant = ModelVariant::kPhs;
    else if (*m == "live_pm") sim.variant = ModelVariant::kLivePm;
    else r.fail(path + "/model_variant", "unknown model variant '" + *m + "' (phs, live_pm)");
  }
  if (const auto f = r.string(*it, path, "friction")) {
    if (*f == "hofer") sim.friction.turbulent = TurbulentCorrelation::kHofer;
    else if (*f == "colebrook_white") sim.friction.turbulent = TurbulentCorrelation::kColebrookWhite;
    else r.fail(path + "/friction", "unknown friction correlation '" + *f + "' (hofer, colebrook_white)");
  }
  if (const auto w = r.number(*it, path, "transition_width")) {
    if (!(*w >= 0.0)) r.fail(path + "/transition_width", "must be non-negative");
    sim.friction.transition_width = *w;
  }
  if (const auto c = r.string(*it, path, "compressibility")) {
    if (*c == "papay") sim.compressibility = CompressibilityModel::kPapay;
    else if (*c == "ideal") sim.compressibility = CompressibilityModel::kIdeal;
    else r.fail(path + "/compressibility", "unknown compressibility model '" + *c + "' (papay, ideal)");
  }
  sim.z_reference_pressure = r.quantity(*it, path, "z_ref_pressure", kPressureUnits);
  if (!sim.z_reference_pressure) s.defaults_used.emplace_back("sim.z_ref_pressure");
}

Scenario read_document(const Reader& r, const Json& root) {
  std::vector<std::string> top = {"name", "gas", "nodes", "pipes", "sim"};
  r.check_keys(root, "", top);
  Scenario s;
  if (const auto name = r.string(root, "", "name")) s.name = *name;
  s.gas = read_gas(r, root, s.defaults_used);

  const auto nodes = root.find("nodes");
  if (nodes == root.end() || !nodes->is_array() || nodes->empty()) r.fail("/nodes", "expected a non-empty array");
  NetworkTopology topo;
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    const std::string path = "/nodes/" + std::to_string(i);
    const Json& n = (*nodes)[i];
    std::vector<std::string> keys = {"id", "kind", "load_profile"};
    Reader::allow_quantity(keys, "elevation", kLengthUnits);
    Reader::allow_quantity(keys, "p_fixed", kPressureUnits);
    Reader::allow_quantity(keys, "p_initial", kPressureUnits);
    Reader::allow_quantity(keys, "load_qn", kFlowUnits);
    r.check_keys(n, path, keys);

    NodeSpec spec;
    spec.id = r.required_string(n, path, "id");
    spec.elevation = r.quantity(n, path, "elevation", kLengthUnits).value_or(0.0);
    const std::string kind = r.string(n, path, "kind").value_or("demand");
    const auto fixed = r.quantity(n, path, "p_fixed", kPressureUnits);
    if (kind == "supply") {
      spec.kind = NodeKind::kSupply;
      if (!fixed) r.fail(path, "supply node needs 'p_fixed_<bar|Pa|kPa|MPa>'");
      spec.fixed_pressure = *fixed;
    } else if (kind == "demand") {
      if (fixed) r.fail(path, "only supply nodes have a fixed pressure");
    } else {
      r.fail(path + "/kind", "unknown node kind '" + kind + "' (supply, demand)");
    }
    spec.initial_pressure = r.quantity(n, path, "p_initial", kPressureUnits);
    spec.load = read_load(r, n, path);
    if (spec.kind == NodeKind::kSupply && !spec.load.empty()) r.fail(path, "supply nodes cannot carry a load");
    try {
      topo.add_node(NetworkNode{spec.id, spec.elevation, spec.kind, spec.fixed_pressure, spec.initial_pressure});
    } catch (const InvalidInput& err) {
      r.fail(path, err.what());
    }
    s.nodes.push_back(std::move(spec));
  }

  const auto pipes = root.find("pipes");
  if (pipes == root.end() || !pipes->is_array() || pipes->empty()) r.fail("/pipes", "expected a non-empty array");
  for (std::size_t i = 0; i < pipes->size(); ++i) {
    const std::string path = "/pipes/" + std::to_string(i);
    const Json& p = (*pipes)[i];
    std::vector<std::string> keys = {"id", "from", "to", "efficiency", "segments", "inclination_sin"};
    Reader::allow_quantity(keys, "length", kLengthUnits);
    Reader::allow_quantity(keys, "diameter", kLengthUnits);
    Reader::allow_quantity(keys, "roughness", kLengthUnits);
    r.check_keys(p, path, keys);

    PipeSpec spec;
    spec.id = r.required_string(p, path, "id");
    spec.from = r.required_string(p, path, "from");
    spec.to = r.required_string(p, path, "to");
    if (spec.from == spec.to) r.fail(path + "/to", "self-loop: pipe '" + spec.id + "' starts and ends at '" + spec.from + "'");
    spec.length = r.required_quantity(p, path, "length", kLengthUnits);
    spec.diameter = r.required_quantity(p, path, "diameter", kLengthUnits);
    spec.roughness = r.required_quantity(p, path, "roughness", kLengthUnits);
    if (const auto e = r.number(p, path, "efficiency")) spec.efficiency = *e;
    else s.defaults_used.push_back("pipes." + spec.id + ".efficiency");
    spec.inclination_sin = r.number(p, path, "inclination_sin");
    if (const auto seg = p.find("segments"); seg != p.end()) {
      if (!seg->is_number_integer() || seg->get<long>() < 1) r.fail(path + "/segments", "expected an integer >= 1");
      spec.segments = seg->get<int>();
    }
    PipeGeometry g;
    g.length = spec.length;
    g.diameter = spec.diameter;
    g.roughness = spec.roughness;
    g.efficiency = spec.efficiency;
    try {
      topo.add_pipe(spec.id, spec.from, spec.to, g, spec.inclination_sin, spec.segments);
    } catch (const InvalidInput& err) {
      r.fail(path, err.what());
    }
    s.pipes.push_back(std::move(spec));
  }
  try {
    topo.validate();
  } catch (const InvalidInput& err) {
    r.fail("/pipes", err.what());
  }

  read_sim(r, root, s);
  try {
    s.validate();
  } catch (const InvalidInput& err) {
    r.fail("/sim", err.what());
  }
  return s;
}

}  // namespace

Scenario parse_scenario_text(std::string_view text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& err) {
    throw ScenarioError(source, "", LineLocator::line_of_offset(text, err.byte > 0 ? err.byte - 1 : 0),
                        std::string("malformed JSON: ") + err.what());
  }
  if (!root.is_object()) throw ScenarioError(source, "/", 1, "expected a JSON object");
  if (root.contains("format")) {
    if (root["format"] != "gasphs-manifest" || !root.contains("scenario")) {
      throw ScenarioError(source, "/format", LineLocator(text).line("/format"), "unsupported document format");
    }
    const Reader r(source, text, "/scenario");
    Scenario s = read_document(r, root["scenario"]);
    s.defaults_used.clear();
    if (const auto it = root.find("defaults_used"); it != root.end() && it->is_array()) {
      for (const auto& d : *it) {
        if (d.is_string()) s.defaults_used.push_back(d.get<std::string>());
      }
    }
    return s;
  }
  const Reader r(source, text, "");
  return read_document(r, root);
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.string());
}

namespace {

OrderedJson scenario_json(const Scenario& s) {
  OrderedJson j;
  j["name"] = s.name;
  j["gas"] = {{"R_J_per_kgK", s.gas.specific_gas_constant}, {"mu_Pa_s", s.gas.dynamic_viscosity},
              {"pc_Pa", s.gas.critical_pressure},           {"Tc_K", s.gas.critical_temperature},
              {"pn_Pa", s.gas.standard_pressure},           {"Tn_K", s.gas.standard_temperature},
              {"T_K", s.gas.operating_temperature}};
  OrderedJson nodes = OrderedJson::array();
  for (const auto& n : s.nodes) {
    OrderedJson o;
    o["id"] = n.id;
    o["kind"] = n.kind == NodeKind::kSupply ? "supply" : "demand";
    o["elevation_m"] = n.elevation;
    if (n.kind == NodeKind::kSupply) o["p_fixed_Pa"] = n.fixed_pressure;
    if (n.initial_pressure) o["p_initial_Pa"] = *n.initial_pressure;
    if (!n.load.empty()) o["load_profile"] = {{"t_s", n.load.times()}, {"qn_m3_per_s", n.load.values()}};
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  OrderedJson pipes = OrderedJson::array();
  for (const auto& p : s.pipes) {
    OrderedJson o;
    o["id"] = p.id;
    o["from"] = p.from;
    o["to"] = p.to;
    o["length_m"] = p.length;
    o["diameter_m"] = p.diameter;
    o["roughness_m"] = p.roughness;
    o["efficiency"] = p.efficiency;
    if (p.inclination_sin) o["inclination_sin"] = *p.inclination_sin;
    o["segments"] = p.segments;
    pipes.push_back(std::move(o));
  }
  j["pipes"] = std::move(pipes);
  OrderedJson sim;
  sim["t_start_s"] = s.sim.t_start;
  sim["t_end_s"] = s.sim.t_end;
  sim["sample_dt_s"] = s.sim.sample_dt;
  sim["rtol"] = s.sim.solver.rtol;
  sim["atol"] = s.sim.solver.atol;
  if (std::isfinite(s.sim.solver.max_step)) sim["max_step_s"] = s.sim.solver.max_step;
  if (s.sim.solver.initial_step > 0.0) sim["initial_step_s"] = s.sim.solver.initial_step;
  sim["max_steps"] = s.sim.solver.max_steps;
  sim["method"] = s.sim.solver.method == OdeMethod::kDormandPrince45 ? "rk45" : "trapezoidal";
  sim["model_variant"] = s.sim.variant == ModelVariant::kPhs ? "phs" : "live_pm";
  sim["friction"] = s.sim.friction.turbulent == TurbulentCorrelation::kHofer ? "hofer" : "colebrook_white";
  sim["transition_width"] = s.sim.friction.transition_width;
  sim["compressibility"] = s.sim.compressibility == CompressibilityModel::kPapay ? "papay" : "ideal";
  if (s.sim.z_reference_pressure) sim["z_ref_pressure_Pa"] = *s.sim.z_reference_pressure;
  j["sim"] = std::move(sim);
  return j;
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario, int indent) { return scenario_json(scenario).dump(indent); }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string out;
  char hex[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", digest[i]);
    out += hex;
  }
  return out;
}

std::string run_manifest_json(const Scenario& scenario, const PreparedRun& run, const ManifestInfo& info,
                              const OdeStats* stats) {
  OrderedJson j;
  j["format"] = "gasphs-manifest";
  j["version"] = kVersion;
  j["command"] = info.command;
  j["input_file"] = info.input_file;
  j["input_digest_sha256"] = info.input_digest;
  j["scenario"] = scenario_json(scenario);
  j["defaults_used"] = scenario.defaults_used;

  const FrozenGasState& gs = run.phs.gas_state();
  OrderedJson frozen;
  frozen["compressibility"] = gs.compressibility;
  frozen["speed_of_sound_sq_m2_per_s2"] = gs.speed_of_sound_sq;
  frozen["standard_density_kg_per_m3"] = gs.standard_density;
  frozen["z_reference_pressure_Pa"] = run.z_reference_pressure;
  frozen["z_reference_defaulted"] = run.z_reference_defaulted;
  OrderedJson pm;
  for (std::size_t e = 0; e < run.phs.edge_count(); ++e) {
    pm[run.phs.topology().edges()[e].id] = run.phs.frozen_mean_pressure(e);
  }
  frozen["gravity_mean_pressure_Pa"] = std::move(pm);
  j["frozen"] = std::move(frozen);

  j["model"] = {{"gravity_mean_pressure", "frozen at the initial live-pM equilibrium"},
                {"resistive_mean_pressure", "live"},
                {"turbulent_correlation",
                 scenario.sim.friction.turbulent == TurbulentCorrelation::kHofer ? "hofer" : "colebrook_white"},
                {"regime_switch_reynolds", kCriticalReynolds}};
  if (stats) {
    j["solver_stats"] = {{"accepted_steps", stats->accepted_steps},
                         {"rejected_steps", stats->rejected_steps},
                         {"rhs_evaluations", stats->rhs_evaluations},
                         {"jacobian_evaluations", stats->jacobian_evaluations}};
  }
  return j.dump(2);
}

Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  Scenario s;
  s.name = "random-" + std::to_string(seed);
  s.gas = GasProperties::natural_gas();
  const std::size_t n = 3 + pick(6);
  const double t_end = 2.0 * units::kSecondsPerHour;
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec node;
    node.id = "n" + std::to_string(i);
    node.elevation = std::round(uniform(-200.0, 200.0));
    if (i == 0) {
      node.kind = NodeKind::kSupply;
      node.fixed_pressure = std::round(uniform(50.0, 70.0)) * units::kPaPerBar;
    } else {
      const double base = uniform(0.0, 30.0 / static_cast<double>(n));
      const double step = uniform(0.0, 30.0 / static_cast<double>(n));
      const double at = uniform(0.2, 0.6) * t_end;
      node.load = LoadProfile({0.0, at, at + 300.0, t_end}, {base, base, base + step, base + step});
    }
    s.nodes.push_back(std::move(node));
  }
  auto add_pipe = [&](std::size_t from, std::size_t to) {
    PipeSpec p;
    p.id = "e" + std::to_string(s.pipes.size());
    p.from = s.nodes[from].id;
    p.to = s.nodes[to].id;
    p.length = std::round(uniform(20.0, 100.0)) * units::kMetersPerKm;
    p.diameter = 0.5 + 0.1 * static_cast<double>(pick(6));
    p.roughness = 0.012 * units::kMetersPerMm;
    p.efficiency = 0.95 + 0.01 * static_cast<double>(pick(6));
    s.pipes.push_back(std::move(p));
  };
  for (std::size_t i = 1; i < n; ++i) add_pipe(pick(i), i);
  const std::size_t extra = pick(3);
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t a = pick(n);
    const std::size_t b = pick(n);
    if (a != b) add_pipe(a, b);
  }
  s.sim.t_end = t_end;
  s.sim.sample_dt = 60.0;
  return s;
}

}  // namespace gasphs
