// Copyright 2026 The hvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hvi/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hvi {

namespace pt = boost::property_tree;

double parse_number(const std::string& text) {
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  const std::string s = trim(text);
  const auto one = [&](const std::string& part) {
    const std::string p = trim(part);
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (p.empty() || used != p.size() || !std::isfinite(v)) {
      throw ConfigError("not a number: '" + text + "'");
    }
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return one(s);
  const double den = one(s.substr(slash + 1));
  if (den == 0.0) throw ConfigError("zero denominator in '" + text + "'");
  return one(s.substr(0, slash)) / den;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_number(item));
  }
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

namespace {

using Setter = std::function<void(Config&, const std::string&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> s;
  const auto data = [&s](const std::string& key, double ContactData::*f) {
    s[key] = [f](Config& c, const std::string& v) { c.data.*f = parse_number(v); };
  };
  const auto law = [&s](const std::string& key, double NormalLaw::*f) {
    s[key] = [f](Config& c, const std::string& v) { c.data.law.*f = parse_number(v); };
  };
  const auto constant = [&s](const std::string& key, double AbstractConstants::*f) {
    s[key] = [f](Config& c, const std::string& v) {
      c.scheme.constants.*f = parse_number(v);
    };
  };
  const auto count = [](const std::string& v) {
    const double x = parse_number(v);
    if (x != std::floor(x) || x < 1 || x > 1e9) {
      throw ConfigError("expected a positive integer, got '" + v + "'");
    }
    return static_cast<int>(x);
  };

  data("domain.L1", &ContactData::L1);
  data("domain.L2", &ContactData::L2);
  data("domain.T", &ContactData::T);

  data("material.E", &ContactData::E);
  data("material.kappa", &ContactData::kappa);
  data("material.mu", &ContactData::mu);
  data("material.relax_amplitude", &ContactData::relax_amplitude);
  data("material.relax_rate", &ContactData::relax_rate);
  data("material.body_force_amplitude", &ContactData::body_force_amplitude);
  data("material.top_traction_amplitude", &ContactData::top_traction_amplitude);

  data("contact.alpha_j", &ContactData::alpha_j);
  data("contact.g", &ContactData::g);
  data("contact.S", &ContactData::S_force);
  law("contact.s1", &NormalLaw::s1);
  law("contact.s2", &NormalLaw::s2);
  law("contact.c1", &NormalLaw::c1);
  law("contact.c2", &NormalLaw::c2);
  law("contact.c3", &NormalLaw::c3);

  s["scheme.name"] = [](Config& c, const std::string& v) {
    c.scheme.scheme = parse_scheme(v);
    c.study.scheme = c.scheme.scheme;
  };
  s["scheme.tol"] = [](Config& c, const std::string& v) {
    c.scheme.outer_tol = parse_number(v);
  };
  s["scheme.inner_tol"] = [](Config& c, const std::string& v) {
    c.scheme.inner_tol = parse_number(v);
  };
  s["scheme.max_iter"] = [count](Config& c, const std::string& v) {
    c.scheme.outer_max_iter = count(v);
  };
  s["scheme.inner_max_iter"] = [count](Config& c, const std::string& v) {
    c.scheme.inner_max_iter = count(v);
  };
  constant("scheme.m_A", &AbstractConstants::m_A);
  constant("scheme.L_A", &AbstractConstants::L_A);
  constant("scheme.alpha_phi", &AbstractConstants::alpha_phi);
  constant("scheme.beta_phi", &AbstractConstants::beta_phi);
  constant("scheme.alpha_j_relax", &AbstractConstants::alpha_j_relax);
  constant("scheme.alpha_c", &AbstractConstants::alpha_c);
  constant("scheme.c_j", &AbstractConstants::c_j);
  constant("scheme.c0", &AbstractConstants::c0_growth);
  constant("scheme.c1", &AbstractConstants::c1_growth);

  s["study.mode"] = [](Config& c, const std::string& v) {
    c.study.mode = parse_study_mode(v);
  };
  s["study.h_levels"] = [](Config& c, const std::string& v) {
    c.study.hs = parse_number_list(v);
  };
  s["study.k_levels"] = [](Config& c, const std::string& v) {
    c.study.ks = parse_number_list(v);
  };
  s["study.h_ref"] = [](Config& c, const std::string& v) {
    c.study.h_ref = parse_number(v);
  };
  s["study.k_ref"] = [](Config& c, const std::string& v) {
    c.study.k_ref = parse_number(v);
  };
  s["study.reference_scheme"] = [](Config& c, const std::string& v) {
    c.study.reference_scheme = parse_scheme(v);
  };
  s["study.h"] = [](Config& c, const std::string& v) { c.h = parse_number(v); };
  s["study.k"] = [](Config& c, const std::string& v) { c.k = parse_number(v); };
  s["study.output"] = [](Config& c, const std::string& v) { c.study.output = v; };
  return s;
}

}  // namespace

void finalize_config(Config& c) {
  std::vector<std::string> bad;
  try {
    c.data.validate();
  } catch (const InvalidArgument& e) {
    bad.emplace_back(e.what());
  }
  try {
    c.scheme.validate();
  } catch (const InvalidArgument& e) {
    bad.emplace_back(e.what());
  }
  try {
    c.study.validate();
  } catch (const InvalidArgument& e) {
    bad.emplace_back(e.what());
  }
  if (!(c.h > 0.0) || !(c.k > 0.0)) bad.emplace_back("study.h and study.k must be > 0");
  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
  c.warnings = c.scheme.constants.warnings();
  const RatePrediction r = predicted_rate(c.scheme.constants);
  if (r.warning) {
    std::ostringstream w;
    w << "predicted fixed-point rate " << r.rho << " >= 1";
    c.warnings.push_back(w.str());
  }
}

Config parse_config(std::istream& in, const std::string& name) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << name << ":" << e.line() << ": " << e.message();
    throw ConfigError(msg.str());
  }
  static const auto table = setters();
  Config c;
  std::vector<std::string> bad;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      bad.push_back("key '" + section + "' outside a section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) {
        bad.push_back("unknown key '" + full + "'");
        continue;
      }
      try {
        it->second(c, value.data());
      } catch (const Error& e) {
        bad.push_back(full + ": " + e.what());
      }
    }
  }
  if (!bad.empty()) {
    std::string msg = name + ": configuration errors:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
  try {
    finalize_config(c);
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  return parse_config(f, path);
}

}  // namespace hvi
