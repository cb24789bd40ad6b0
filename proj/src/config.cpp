#include "cini/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cini/errors.hpp"

namespace cini {

using nlohmann::json;

bool RunConfig::has_task(Task t) const {
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

AuxInit RunConfig::aux_init_for(int level) const {
  if (std::holds_alternative<AlignedAuxInit>(aux_init)) return AlignedAuxInit{};
  return std::get<std::vector<ExplicitAuxInit>>(aux_init).at(level);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

// Rejects keys outside the allowed set and reports missing required keys.
void check_keys(const json& obj, const std::string& path, const std::set<std::string>& required,
                const std::set<std::string>& optional) {
  require_object(obj, path);
  for (const auto& [key, value] : obj.items()) {
    if (!required.count(key) && !optional.count(key)) fail(path, "unknown key '" + key + "'");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(path + "." + key, "missing");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

Schedule parse_schedule(const json& j, const std::string& path);

Schedule parse_schedule_typed(const json& j, const std::string& path) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") {
    check_keys(j, path, {"type", "value"}, {});
    return Schedule::constant(get_number(j, path, "value"));
  }
  if (type == "linear") {
    check_keys(j, path, {"type", "offset", "slope"}, {});
    return Schedule::linear(get_number(j, path, "offset"), get_number(j, path, "slope"));
  }
  if (type == "cosine") {
    check_keys(j, path, {"type", "amplitude", "omega", "delta"}, {});
    return Schedule::cosine(get_number(j, path, "amplitude"), get_number(j, path, "omega"),
                            get_number(j, path, "delta"));
  }
  if (type == "sum") {
    check_keys(j, path, {"type", "parts"}, {});
    const json& parts = j.at("parts");
    if (!parts.is_array() || parts.empty()) fail(path + ".parts", "expected a nonempty array");
    std::vector<Schedule> out;
    for (size_t i = 0; i < parts.size(); ++i)
      out.push_back(parse_schedule(parts[i], path + ".parts[" + std::to_string(i) + "]"));
    return Schedule::sum(std::move(out));
  }
  fail(path + ".type", "unknown schedule type '" + type + "'");
}

Schedule parse_schedule(const json& j, const std::string& path) {
  if (j.is_number()) return Schedule::constant(j.get<double>());  // shorthand for constant
  require_object(j, path);
  if (!j.contains("type")) fail(path + ".type", "missing");
  return parse_schedule_typed(j, path);
}

ComplexSchedule parse_complex_schedule(const json& j, const std::string& path) {
  check_keys(j, path, {"amplitude"}, {"phase"});
  ComplexSchedule cs;
  cs.amplitude = parse_schedule(j.at("amplitude"), path + ".amplitude");
  cs.phase = j.contains("phase") ? parse_schedule(j.at("phase"), path + ".phase")
                                 : Schedule::constant(0.0);
  return cs;
}

Vector parse_complex_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of [re, im] pairs");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string ep = path + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      fail(ep, "expected [re, im]");
    v(i) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

// Duplicate-key rejection through the SAX parse callback: nlohmann's DOM
// silently keeps the last duplicate otherwise.
json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> stack;
  json::parser_callback_t cb = [&stack](int /*depth*/, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        stack.emplace_back();
        break;
      case json::parse_event_t::object_end:
        stack.pop_back();
        break;
      case json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!stack.back().insert(key).second) throw ConfigError("duplicate key '" + key + "'");
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

RunConfig parse_config_impl(const std::string& json_text) {
  const json root = parse_strict(json_text);
  check_keys(root, "config", {"label", "detector", "levels", "grid"},
             {"initial_state", "aux_init", "eps_sing", "tasks", "output_dir", "amplitudes",
              "decoherence_two_m"});
  RunConfig cfg;

  const json& jl = root.at("label");
  check_keys(jl, "label", {"n1", "n2"}, {});
  const int n1 = get_int(jl, "label", "n1");
  const int n2 = get_int(jl, "label", "n2");
  if (n1 < 0) fail("label.n1", "must be >= 0");
  if (n2 < 0) fail("label.n2", "must be >= 0");
  cfg.label = SubspaceLabel(n1, n2);
  const int two_j = cfg.label.two_j();

  const json& jd = root.at("detector");
  check_keys(jd, "detector", {"omega1", "omega2"}, {});
  cfg.detector.omega1 = parse_schedule(jd.at("omega1"), "detector.omega1");
  cfg.detector.omega2 = parse_schedule(jd.at("omega2"), "detector.omega2");

  const json& jlv = root.at("levels");
  if (!jlv.is_array() || jlv.empty()) fail("levels", "expected a nonempty array");
  for (size_t k = 0; k < jlv.size(); ++k) {
    const std::string path = "levels[" + std::to_string(k) + "]";
    check_keys(jlv[k], path, {"E", "g"}, {});
    LevelParams lp;
    lp.E = parse_schedule(jlv[k].at("E"), path + ".E");
    lp.g = parse_complex_schedule(jlv[k].at("g"), path + ".g");
    cfg.levels.push_back(std::move(lp));
  }

  const json& jg = root.at("grid");
  check_keys(jg, "grid", {"t0", "t1", "steps"}, {});
  const double t0 = get_number(jg, "grid", "t0");
  const double t1 = get_number(jg, "grid", "t1");
  const int steps = get_int(jg, "grid", "steps");
  if (steps < 2) fail("grid.steps", "must be >= 2");
  if (!(t1 > t0)) fail("grid.t1", "must exceed grid.t0");
  cfg.grid = TimeGrid(t0, t1, steps);

  cfg.initial_state = AlignedInitialState{two_j};
  if (root.contains("initial_state")) {
    const json& ji = root.at("initial_state");
    require_object(ji, "initial_state");
    if (ji.contains("aligned_m")) {
      check_keys(ji, "initial_state", {"aligned_m"}, {});
      const json& ja = ji.at("aligned_m");
      check_keys(ja, "initial_state.aligned_m", {"two_m"}, {});
      const int two_m = get_int(ja, "initial_state.aligned_m", "two_m");
      if (std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0)
        fail("initial_state.aligned_m.two_m", "out of range or parity mismatch with label");
      cfg.initial_state = AlignedInitialState{two_m};
    } else if (ji.contains("vector")) {
      check_keys(ji, "initial_state", {"vector"}, {});
      Vector v = parse_complex_vector(ji.at("vector"), "initial_state.vector");
      if (v.size() != two_j + 1) fail("initial_state.vector", "length must equal 2j+1");
      if (std::abs(v.norm() - 1.0) > 1e-8) fail("initial_state.vector", "must be normalized");
      cfg.initial_state = v;
    } else {
      fail("initial_state", "expected 'aligned_m' or 'vector'");
    }
  }

  cfg.aux_init = AlignedAuxInit{};
  if (root.contains("aux_init")) {
    const json& ja = root.at("aux_init");
    if (ja.is_string()) {
      if (ja.get<std::string>() != "aligned") fail("aux_init", "expected \"aligned\" or an array");
    } else if (ja.is_array()) {
      if (ja.size() != cfg.levels.size()) fail("aux_init", "need one entry per level");
      std::vector<ExplicitAuxInit> inits;
      for (size_t k = 0; k < ja.size(); ++k) {
        const std::string path = "aux_init[" + std::to_string(k) + "]";
        check_keys(ja[k], path, {"lambda0", "gamma0"}, {});
        inits.push_back({get_number(ja[k], path, "lambda0"), get_number(ja[k], path, "gamma0")});
      }
      cfg.aux_init = std::move(inits);
    } else {
      fail("aux_init", "expected \"aligned\" or an array");
    }
  }

  if (root.contains("eps_sing")) {
    cfg.eps_sing = get_number(root, "config", "eps_sing");
    if (!(cfg.eps_sing > 0.0)) fail("eps_sing", "must be > 0");
  }

  cfg.tasks = {Task::aux, Task::phases, Task::state, Task::fidelity};
  if (root.contains("tasks")) {
    const json& jt = root.at("tasks");
    if (!jt.is_array()) fail("tasks", "expected an array of task names");
    cfg.tasks.clear();
    for (size_t i = 0; i < jt.size(); ++i) {
      const std::string name = jt[i].get<std::string>();
      if (name == "aux") cfg.tasks.push_back(Task::aux);
      else if (name == "phases") cfg.tasks.push_back(Task::phases);
      else if (name == "state") cfg.tasks.push_back(Task::state);
      else if (name == "fidelity") cfg.tasks.push_back(Task::fidelity);
      else fail("tasks[" + std::to_string(i) + "]", "unknown task '" + name + "'");
    }
  }

  if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();

  cfg.decoherence_two_m = two_j;
  if (root.contains("decoherence_two_m")) {
    const int two_m = get_int(root, "config", "decoherence_two_m");
    if (std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0)
      fail("decoherence_two_m", "out of range or parity mismatch with label");
    cfg.decoherence_two_m = two_m;
  }

  if (root.contains("amplitudes")) {
    Vector a = parse_complex_vector(root.at("amplitudes"), "amplitudes");
    if (a.size() != static_cast<Eigen::Index>(cfg.levels.size()))
      fail("amplitudes", "need one entry per level");
    if (std::abs(a.norm() - 1.0) > 1e-8) fail("amplitudes", "must be normalized");
    cfg.amplitudes = std::move(a);
  }

  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  try {
    return parse_config_impl(json_text);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cini
