#include "cpwm/config.hpp"

#include "cpwm/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace cpwm {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// value with optional trailing unit tag; only energies may carry cm-1
double parse_number(const std::string& raw, const std::string& key, bool energy) {
  std::string text = trim(raw);
  double scale = 1.0;
  const auto sp = text.find_first_of(" \t");
  if (sp != std::string::npos) {
    const std::string tag = trim(text.substr(sp));
    text = text.substr(0, sp);
    if (tag == "cm-1" && energy) scale = cm1_to_hartree;
    else if (tag == "hartree" && energy) scale = 1.0;
    else fail_validation("unrecognized unit tag '" + tag + "'", key);
  }
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) fail_validation("malformed number '" + text + "'", key);
    return v * scale;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail_validation("malformed number '" + text + "'", key);
  }
  return 0;
}

int parse_int(const std::string& raw, const std::string& key) {
  const double v = parse_number(raw, key, false);
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) fail_validation("expected an integer", key);
  return static_cast<int>(r);
}

struct Section {
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;
  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : kv)
      if (k == key) return &v;
    return nullptr;
  }
};

PotentialModel build_potential(const Section& sec, const std::string& base_dir) {
  const std::string* kind = sec.find("kind");
  if (!kind) fail_validation("potential section missing required key", "kind");

  auto need = [&](const char* key) -> const std::string& {
    const std::string* v = sec.find(key);
    if (!v) fail_validation("potential section missing required key", key);
    return *v;
  };
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : sec.kv) {
      (void)v;
      bool ok = k == "kind";
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail_validation("unknown key in potential section", k);
    }
  };

  if (*kind == "eckart") {
    check_keys({"V0", "alpha", "center"});
    const std::string* c = sec.find("center");
    return PotentialModel::make_eckart(parse_number(need("V0"), "V0", true),
                                       parse_number(need("alpha"), "alpha", false),
                                       c ? parse_number(*c, "center", false) : 0.0);
  }
  if (*kind == "tanh_ramp") {
    check_keys({"V_L", "V_R", "x0", "beta"});
    return PotentialModel::make_tanh_ramp(parse_number(need("V_L"), "V_L", true),
                                          parse_number(need("V_R"), "V_R", true),
                                          parse_number(need("x0"), "x0", false),
                                          parse_number(need("beta"), "beta", false));
  }
  if (*kind == "tabulated") {
    check_keys({"file"});
    std::filesystem::path p = need("file");
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return PotentialModel::load_tabulated(p.string());
  }
  fail_validation("unknown potential kind '" + *kind + "'", "kind");
  return {};
}

SchemeKind parse_scheme(const std::string& s) {
  if (s == "constant" || s == "constant-velocity") return SchemeKind::constant_velocity;
  if (s == "discontinuous") return SchemeKind::discontinuous;
  if (s == "ramp") return SchemeKind::ramp;
  fail_validation("unknown scheme '" + s + "'", "scheme");
  return SchemeKind::constant_velocity;
}

const char* scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::constant_velocity: return "constant";
    case SchemeKind::discontinuous: return "discontinuous";
    case SchemeKind::ramp: return "ramp";
  }
  return "constant";
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  Section main;
  std::vector<Section> pots; // [potential] followed by its [potential.term]s
  Section* cur = &main;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail_validation("malformed section header: " + t);
      const std::string name = trim(t.substr(1, t.size() - 2));
      if (name != "potential" && name != "potential.term")
        fail_validation("unknown section [" + name + "]");
      if (name == "potential.term" && pots.empty())
        fail_validation("[potential.term] must follow a [potential] section");
      pots.push_back({name, {}});
      cur = &pots.back();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail_validation("expected 'key = value': " + t);
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty()) fail_validation("empty key in line: " + t);
    cur->kv.emplace_back(key, val);
  }

  RunConfig cfg;
  bool have[8] = {};
  enum { kScheme, kE, kN, kDt, kXL, kXR, kTmax, kBeta };

  for (const auto& [key, val] : main.kv) {
    if (key == "scheme") { cfg.scheme = parse_scheme(val); have[kScheme] = true; }
    else if (key == "E") { cfg.E = parse_number(val, key, true); have[kE] = true; }
    else if (key == "m") cfg.m = parse_number(val, key, false);
    else if (key == "N") { cfg.N = parse_int(val, key); have[kN] = true; }
    else if (key == "dt") { cfg.dt = parse_number(val, key, false); have[kDt] = true; }
    else if (key == "x_L") { cfg.x_L = parse_number(val, key, false); have[kXL] = true; }
    else if (key == "x_R") { cfg.x_R = parse_number(val, key, false); have[kXR] = true; }
    else if (key == "x0") cfg.x0 = parse_number(val, key, false);
    else if (key == "beta") { cfg.beta = parse_number(val, key, false); have[kBeta] = true; }
    else if (key == "t_shift") cfg.t_shift = parse_number(val, key, false);
    else if (key == "t_max") { cfg.t_max = parse_number(val, key, false); have[kTmax] = true; }
    else if (key == "M") cfg.M = parse_int(val, key);
    else if (key == "stationarity_tol") cfg.stationarity_tol = parse_number(val, key, false);
    else if (key == "snapshot_stride") cfg.snapshot_stride = parse_int(val, key);
    else if (key == "out") cfg.out_dir = val;
    else fail_validation("unknown key", key);
  }

  static const char* req_names[] = {"scheme", "E", "N", "dt", "x_L", "x_R", "t_max"};
  for (int i = 0; i < 7; ++i)
    if (!have[i]) fail_validation("missing required key", req_names[i]);
  if (cfg.scheme == SchemeKind::ramp && !have[kBeta])
    fail_validation("ramp scheme requires the effective-ramp steepness", "beta");

  if (pots.empty()) fail_validation("missing [potential] section", "potential");
  if (pots[0].name != "potential") fail_validation("first section must be [potential]");

  if (pots.size() == 1) {
    cfg.potential = build_potential(pots[0], base_dir);
  } else {
    const std::string* kind = pots[0].find("kind");
    if (!kind || *kind != "sum")
      fail_validation("[potential.term] sections require kind = sum in [potential]", "kind");
    for (const auto& [k, v] : pots[0].kv) {
      (void)v;
      if (k != "kind") fail_validation("unknown key in potential section", k);
    }
    std::vector<PotentialModel> terms;
    for (size_t i = 1; i < pots.size(); ++i)
      terms.push_back(build_potential(pots[i], base_dir));
    cfg.potential = PotentialModel::make_sum(std::move(terms));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

json potential_to_json(const PotentialModel& p) {
  json j;
  switch (p.kind) {
    case PotentialKind::eckart:
      j = {{"kind", "eckart"}, {"V0", p.V0}, {"alpha", p.alpha}, {"center", p.center}};
      break;
    case PotentialKind::tanh_ramp:
      j = {{"kind", "tanh_ramp"}, {"V_L", p.V_L}, {"V_R", p.V_R}, {"x0", p.x0}, {"beta", p.beta}};
      break;
    case PotentialKind::sum: {
      j["kind"] = "sum";
      for (const auto& t : p.terms) j["terms"].push_back(potential_to_json(t));
      break;
    }
    case PotentialKind::tabulated:
      j["kind"] = "tabulated";
      if (!p.source_file.empty()) {
        j["file"] = p.source_file;
      } else {
        j["x"] = p.xs;
        j["V"] = p.Vs;
      }
      break;
  }
  return j;
}

PotentialModel potential_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "eckart")
    return PotentialModel::make_eckart(j.at("V0").get<double>(), j.at("alpha").get<double>(),
                                       j.value("center", 0.0));
  if (kind == "tanh_ramp")
    return PotentialModel::make_tanh_ramp(j.at("V_L").get<double>(), j.at("V_R").get<double>(),
                                          j.at("x0").get<double>(), j.at("beta").get<double>());
  if (kind == "sum") {
    std::vector<PotentialModel> terms;
    for (const auto& t : j.at("terms")) terms.push_back(potential_from_json(t));
    return PotentialModel::make_sum(std::move(terms));
  }
  if (kind == "tabulated") {
    if (j.contains("file")) return PotentialModel::load_tabulated(j.at("file").get<std::string>());
    return PotentialModel::make_tabulated(j.at("x").get<std::vector<double>>(),
                                          j.at("V").get<std::vector<double>>());
  }
  fail_validation("unknown potential kind '" + kind + "'", "kind");
  return {};
}

} // namespace

std::string echo_params_json(const RunConfig& cfg) {
  json j;
  j["scheme"] = scheme_name(cfg.scheme);
  j["potential"] = potential_to_json(cfg.potential);
  j["E"] = cfg.E;
  j["m"] = cfg.m;
  j["N"] = cfg.N;
  j["dt"] = cfg.dt;
  j["x_L"] = cfg.x_L;
  j["x_R"] = cfg.x_R;
  j["t_max"] = cfg.t_max;
  j["M"] = cfg.M;
  if (cfg.scheme != SchemeKind::constant_velocity) j["x0"] = cfg.x0;
  if (cfg.scheme == SchemeKind::ramp) j["beta"] = cfg.beta;
  if (cfg.t_shift) j["t_shift"] = *cfg.t_shift;
  if (cfg.stationarity_tol) j["stationarity_tol"] = *cfg.stationarity_tol;
  if (cfg.snapshot_stride) j["snapshot_stride"] = *cfg.snapshot_stride;
  if (!cfg.out_dir.empty()) j["out"] = cfg.out_dir;
  return j.dump();
}

RunConfig config_from_echo(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    fail_validation(std::string("malformed params JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.scheme = parse_scheme(j.at("scheme").get<std::string>());
    cfg.potential = potential_from_json(j.at("potential"));
    cfg.E = j.at("E").get<double>();
    cfg.m = j.value("m", default_mass);
    cfg.N = j.at("N").get<int>();
    cfg.dt = j.at("dt").get<double>();
    cfg.x_L = j.at("x_L").get<double>();
    cfg.x_R = j.at("x_R").get<double>();
    cfg.t_max = j.at("t_max").get<double>();
    cfg.M = j.value("M", 5);
    cfg.x0 = j.value("x0", 0.0);
    cfg.beta = j.value("beta", 0.0);
    if (j.contains("t_shift")) cfg.t_shift = j.at("t_shift").get<double>();
    if (j.contains("stationarity_tol")) cfg.stationarity_tol = j.at("stationarity_tol").get<double>();
    if (j.contains("snapshot_stride")) cfg.snapshot_stride = j.at("snapshot_stride").get<int>();
    cfg.out_dir = j.value("out", std::string{});
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail_validation(std::string("params JSON missing or mistyped field: ") + e.what());
  }
  return cfg;
}

} // namespace cpwm
