// Copyright 2026 The spinmbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "cli.hpp"

namespace spinmbqc::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// A factor such as "3", "pi", "2pi", "3*pi" or "0.5".
double parse_factor(std::string s, const std::string& whole) {
  s = trim(s);
  if (s.empty()) throw ConfigError("cannot parse number '" + whole + "'");
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty()) return scale;
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + whole + "'");
  }
  if (used != s.size()) throw ConfigError("cannot parse number '" + whole + "'");
  return v * scale;
}

}  // namespace

double parse_number(const std::string& text) {
  std::string s = trim(text);
  double sign = 1;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    // Only peel the sign when it does not belong to a plain numeric literal.
    if (s.find("pi") != std::string::npos || s.find('/') != std::string::npos) {
      sign = s[0] == '-' ? -1 : 1;
      s = s.substr(1);
    }
  }
  double v;
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    v = parse_factor(s, text);
  } else {
    const double den = parse_factor(s.substr(slash + 1), text);
    if (den == 0) throw ConfigError("division by zero in '" + text + "'");
    v = parse_factor(s.substr(0, slash), text) / den;
  }
  v *= sign;
  if (!std::isfinite(v)) throw ConfigError("non-finite number '" + text + "'");
  return v;
}

namespace {

double as_number(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError("'" + key + "' must be a number");
  return parse_number(n.Scalar());
}

// Scalar, list, or {start, stop, steps[, include]} with both ends included.
std::vector<double> parse_grid(const YAML::Node& n, const std::string& key) {
  std::vector<double> out;
  if (n.IsScalar()) {
    out.push_back(as_number(n, key));
  } else if (n.IsSequence()) {
    for (const auto& e : n) out.push_back(as_number(e, key));
  } else if (n.IsMap()) {
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      if (k != "start" && k != "stop" && k != "steps" && k != "include") {
        throw ConfigError("unknown grid key '" + k + "' in '" + key + "'");
      }
    }
    if (!n["start"] || !n["stop"] || !n["steps"]) {
      throw ConfigError("grid '" + key + "' needs start, stop and steps");
    }
    const double a = as_number(n["start"], key), b = as_number(n["stop"], key);
    const double steps = as_number(n["steps"], key);
    if (steps < 1 || steps != std::floor(steps)) throw ConfigError("grid '" + key + "': steps must be a positive integer");
    const auto m = static_cast<std::size_t>(steps);
    for (std::size_t i = 0; i < m; ++i) out.push_back(m == 1 ? a : a + (b - a) * double(i) / double(m - 1));
    if (const auto inc = n["include"]) {
      for (double v : parse_grid(inc, key)) {
        bool dup = false;
        for (double w : out) dup = dup || std::abs(v - w) < 1e-12;
        if (!dup) out.push_back(v);
      }
      const bool up = b >= a;
      std::sort(out.begin(), out.end(), [up](double x, double y) { return up ? x < y : x > y; });
    }
  } else {
    throw ConfigError("'" + key + "' must be a number, a list or a grid");
  }
  if (out.empty()) throw ConfigError("grid '" + key + "' is empty");
  return out;
}

std::vector<std::size_t> parse_int_grid(const YAML::Node& n, const std::string& key, std::size_t min) {
  std::vector<std::size_t> out;
  for (double v : parse_grid(n, key)) {
    if (v != std::floor(v) || v < double(min)) {
      throw ConfigError("'" + key + "' entries must be integers >= " + std::to_string(min));
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Method parse_method(const std::string& s) {
  if (s == "expansion") return Method::expansion;
  if (s == "haldane" || s == "haldane_closed_form") return Method::haldane_closed_form;
  if (s == "oracle") return Method::oracle;
  throw ConfigError("unknown method '" + s + "'");
}

std::vector<GateSpec> parse_gates(const YAML::Node& n) {
  std::vector<GateSpec> out;
  auto from_map = [](const YAML::Node& m) {
    for (const auto& kv : m) {
      const auto k = kv.first.as<std::string>();
      if (k != "theta" && k != "phi" && k != "lambda") throw ConfigError("unknown gate key '" + k + "'");
    }
    std::vector<double> th{0}, ph{0}, la{0};
    if (m["theta"]) th = parse_grid(m["theta"], "theta");
    if (m["phi"]) ph = parse_grid(m["phi"], "phi");
    if (m["lambda"]) la = parse_grid(m["lambda"], "lambda");
    std::vector<GateSpec> g;
    for (double t : th)
      for (double p : ph)
        for (double l : la) g.push_back({t, p, l});
    return g;
  };
  if (n.IsScalar()) {
    out.push_back({as_number(n, "gates"), 0, 0});
  } else if (n.IsMap()) {
    out = from_map(n);
  } else if (n.IsSequence()) {
    for (const auto& e : n) {
      if (e.IsScalar()) {
        out.push_back({as_number(e, "gates"), 0, 0});
      } else if (e.IsMap()) {
        for (const auto& g : from_map(e)) out.push_back(g);
      } else {
        throw ConfigError("gate entries must be angles or {theta, phi, lambda} maps");
      }
    }
  } else {
    throw ConfigError("'gates' must be an angle, a list or a map");
  }
  if (out.empty()) throw ConfigError("'gates' is empty");
  return out;
}

void parse_dmrg(const YAML::Node& n, DmrgConfig& d) {
  if (!n.IsMap()) throw ConfigError("'dmrg' must be a map");
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    const auto& v = kv.second;
    auto positive_int = [&](const std::string& key) {
      const double x = as_number(v, key);
      if (x < 1 || x != std::floor(x)) throw ConfigError("dmrg." + key + " must be a positive integer");
      return static_cast<std::size_t>(x);
    };
    if (k == "max_bond") {
      d.max_bond = positive_int(k);
    } else if (k == "max_sweeps") {
      d.max_sweeps = positive_int(k);
    } else if (k == "lanczos_max_iter") {
      d.lanczos_max_iter = positive_int(k);
    } else if (k == "cutoff") {
      d.cutoff = as_number(v, k);
    } else if (k == "energy_tol") {
      d.energy_tol = as_number(v, k);
    } else if (k == "lanczos_tol") {
      d.lanczos_tol = as_number(v, k);
    } else if (k == "noise") {
      d.noise = parse_grid(v, k);
    } else {
      throw ConfigError("unknown dmrg key '" + k + "'");
    }
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a map of keys");
  ExperimentConfig c;
  std::set<std::string> given;
  try {
    for (const auto& kv : root) {
      const auto k = kv.first.as<std::string>();
      const auto& v = kv.second;
      given.insert(k);
      if (k == "name") {
        c.name = v.as<std::string>();
      } else if (k == "model") {
        try {
          c.model = parse_model(v.as<std::string>());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      } else if (k == "L") {
        c.L = parse_int_grid(v, k, 1);
      } else if (k == "N") {
        c.N = parse_int_grid(v, k, 0);
      } else if (k == "alpha") {
        c.alpha = parse_grid(v, k);
      } else if (k == "J") {
        c.J = parse_grid(v, k);
      } else if (k == "D") {
        c.D = parse_grid(v, k);
      } else if (k == "gates") {
        c.gates = parse_gates(v);
      } else if (k == "methods") {
        c.methods.clear();
        if (v.IsScalar()) {
          c.methods.push_back(parse_method(v.as<std::string>()));
        } else {
          for (const auto& m : v) c.methods.push_back(parse_method(m.as<std::string>()));
        }
        if (c.methods.empty()) throw ConfigError("'methods' is empty");
      } else if (k == "dmrg") {
        parse_dmrg(v, c.dmrg);
      } else if (k == "seed") {
        const double s = as_number(v, k);
        if (s < 0 || s != std::floor(s)) throw ConfigError("'seed' must be a non-negative integer");
        c.seed = static_cast<std::uint64_t>(s);
      } else if (k == "tolerance") {
        c.tolerance = as_number(v, k);
        if (!(c.tolerance > 0)) throw ConfigError("'tolerance' must be positive");
      } else if (k == "haldane_threshold") {
        c.haldane_threshold = as_number(v, k);
      } else {
        throw ConfigError("unknown key '" + k + "'");
      }
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML: ") + e.what());
  }
  if (!given.count("model")) throw ConfigError("missing key 'model'");

  // Parameters that the chosen model does not have are rejected to catch typos.
  std::set<std::string> allowed{"L"};
  switch (c.model) {
    case ModelKind::aklt: break;
    case ModelKind::blbq: allowed.insert("alpha"); break;
    case ModelKind::xxz: allowed.insert({"J", "D"}); break;
    case ModelKind::blocked: allowed.insert({"J", "D", "N"}); break;
  }
  for (const char* p : {"alpha", "J", "D", "N"}) {
    if (given.count(p) && !allowed.count(p)) {
      throw ConfigError(std::string("model '") + model_name(c.model) + "' has no parameter '" + p + "'");
    }
  }
  std::sort(c.methods.begin(), c.methods.end());
  c.methods.erase(std::unique(c.methods.begin(), c.methods.end()), c.methods.end());
  for (const auto& spec : c.points()) {
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str());
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

std::vector<HamiltonianSpec> ExperimentConfig::points() const {
  std::vector<HamiltonianSpec> out;
  for (std::size_t l : L) {
    switch (model) {
      case ModelKind::aklt: out.push_back(HamiltonianSpec::aklt(l)); break;
      case ModelKind::blbq:
        for (double a : alpha) out.push_back(HamiltonianSpec::blbq(l, a));
        break;
      case ModelKind::xxz:
        for (double j : J)
          for (double d : D) out.push_back(HamiltonianSpec::xxz(l, j, d));
        break;
      case ModelKind::blocked:
        for (std::size_t n : N)
          for (double j : J)
            for (double d : D) out.push_back(HamiltonianSpec::blocked(l, j, d, n));
        break;
    }
  }
  return out;
}

std::string ExperimentConfig::canonical() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["model"] = model_name(model);
  j["L"] = L;
  if (model == ModelKind::blocked) j["N"] = N;
  if (model == ModelKind::blbq) j["alpha"] = alpha;
  if (model == ModelKind::xxz || model == ModelKind::blocked) {
    j["J"] = J;
    j["D"] = D;
  }
  auto gates_json = nlohmann::ordered_json::array();
  for (const auto& g : gates) gates_json.push_back({g.theta, g.phi, g.lambda});
  j["gates"] = gates_json;
  auto methods_json = nlohmann::ordered_json::array();
  for (Method m : methods) methods_json.push_back(method_name(m));
  j["methods"] = methods_json;
  j["dmrg"] = {{"max_bond", dmrg.max_bond},   {"cutoff", dmrg.cutoff},
               {"max_sweeps", dmrg.max_sweeps}, {"energy_tol", dmrg.energy_tol},
               {"noise", dmrg.noise},          {"lanczos_tol", dmrg.lanczos_tol},
               {"lanczos_max_iter", dmrg.lanczos_max_iter}};
  j["seed"] = seed;
  j["tolerance"] = tolerance;
  j["haldane_threshold"] = haldane_threshold;
  return j.dump();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

}  // namespace spinmbqc::cli
