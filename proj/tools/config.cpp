#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace conecusp::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kGenerators = {"h0"};

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
  return x;
}

Complex point(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(what + " must be [re, im]");
  return {number(v[0], what), number(v[1], what)};
}

const json& required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing '") + key + "' in " + where);
  return obj.at(key);
}

void parse_source(const json& s, InstanceConfig& cfg) {
  if (s.is_object() && s.contains("generator")) {
    only_keys(s, {"generator", "tail_start"}, "source");
    if (!s["generator"].is_string()) throw ConfigError("source.generator must be a string");
    cfg.generator = s["generator"].get<std::string>();
    if (!kGenerators.contains(cfg.generator)) {
      throw ConfigError("unknown generator '" + cfg.generator + "'");
    }
    const json& ts = required(s, "tail_start", "source");
    if (!ts.is_number_integer() || ts.get<long long>() < 1) {
      throw ConfigError("source.tail_start must be a positive integer");
    }
    cfg.tail_start = ts.get<std::size_t>();
    return;
  }
  only_keys(s, {"terms"}, "source");
  const json& list = required(s, "terms", "source");
  if (!list.is_array() || list.empty()) throw ConfigError("source.terms must be a non-empty array");
  for (const auto& t : list) {
    if (!t.is_array() || t.size() != 4) {
      throw ConfigError("each term must be [a_re, a_im, z_re, z_im]");
    }
    cfg.terms.push_back({{number(t[0], "term"), number(t[1], "term")},
                         {number(t[2], "term"), number(t[3], "term")}});
  }
}

}  // namespace

Tolerances::Tolerances()
    : values_{{"class_tol", 1e-6},      {"cone_tol", 0.05},     {"curvature_tol", 1e-4},
              {"cusp_theta_max", 0.3},  {"lambda0_resolution", 0.05},
              {"monodromy_tol", 1e-8},  {"tail_tol", 1e-10},    {"zero_tol", 1e-12}} {}

double Tolerances::get(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw ConfigError("unknown tolerance '" + name + "'");
  return it->second;
}

void Tolerances::set(const std::string& name, double value) {
  const auto it = values_.find(name);
  if (it == values_.end()) throw ConfigError("unknown tolerance '" + name + "'");
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError("tolerance '" + name + "' must be positive");
  }
  it->second = value;
}

void apply_tolerance_override(Tolerances& tol, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--tol expects NAME=VAL");
  const std::string name = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("--tol value for '" + name + "' is not a number");
  }
  tol.set(name, value);
}

MeromorphicSum InstanceConfig::source() const {
  if (has_generator()) return MeromorphicSum::h0(tail_start);
  return MeromorphicSum(terms);
}

InstanceConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, {"schema_version", "source", "lambda", "window", "domain", "base_point",
                   "spacing", "tolerances", "output", "verify"},
            "config");
  const json& version = required(root, "schema_version", "config");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion) {
    throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
  }

  InstanceConfig cfg;
  parse_source(required(root, "source", "config"), cfg);

  if (root.contains("lambda")) {
    const json& l = root["lambda"];
    if (l.is_string()) {
      if (l.get<std::string>() != "auto") throw ConfigError("lambda must be a number or \"auto\"");
    } else {
      cfg.lambda = number(l, "lambda");
    }
  }

  const json& w = required(root, "window", "config");
  only_keys(w, {"x_min", "x_max", "y_min", "y_max"}, "window");
  cfg.window = Rect{number(required(w, "x_min", "window"), "window.x_min"),
                    number(required(w, "x_max", "window"), "window.x_max"),
                    number(required(w, "y_min", "window"), "window.y_min"),
                    number(required(w, "y_max", "window"), "window.y_max")};
  if (cfg.window.empty()) throw ConfigError("window is empty");

  if (root.contains("domain")) {
    const json& d = root["domain"];
    only_keys(d, {"center", "radius"}, "domain");
    Disc disc{point(required(d, "center", "domain"), "domain.center"),
              number(required(d, "radius", "domain"), "domain.radius")};
    if (!(disc.radius > 0.0)) throw ConfigError("domain.radius must be positive");
    cfg.domain = disc;
  }
  if (root.contains("base_point")) cfg.base_point = point(root["base_point"], "base_point");
  if (root.contains("spacing")) {
    cfg.spacing = number(root["spacing"], "spacing");
    if (!(cfg.spacing > 0.0)) throw ConfigError("spacing must be positive");
  }
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      cfg.tolerances.set(it.key(), number(it.value(), "tolerances." + it.key()));
    }
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    only_keys(o, {"pgm"}, "output");
    if (o.contains("pgm")) {
      if (!o["pgm"].is_boolean()) throw ConfigError("output.pgm must be a boolean");
      cfg.pgm = o["pgm"].get<bool>();
    }
  }
  if (root.contains("verify")) {
    const json& v = root["verify"];
    only_keys(v, {"curvature_points"}, "verify");
    if (v.contains("curvature_points")) {
      const json& n = v["curvature_points"];
      if (!n.is_number_integer() || n.get<long long>() < 1) {
        throw ConfigError("verify.curvature_points must be a positive integer");
      }
      cfg.verify_points = n.get<std::size_t>();
    }
  }
  return cfg;
}

InstanceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace conecusp::cli
