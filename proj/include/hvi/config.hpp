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

#ifndef HVI_CONFIG_HPP
#define HVI_CONFIG_HPP

#include "hvi/contact_model.hpp"
#include "hvi/step_schemes.hpp"
#include "hvi/study.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hvi {

/// Malformed or invalid configuration. The message names the file and,
/// for syntax errors, the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Config {
  ContactData data;
  SchemeConfig scheme;
  StudySpec study;
  double h = 1.0 / 16.0;  // grid of single solve and profile runs
  double k = 1.0 / 16.0;
  std::vector<std::string> warnings;  // violated smallness conditions
};

/// INI text with sections [domain], [material], [contact], [scheme] and
/// [study]. Omitted keys keep their defaults; unknown keys are errors.
/// Numbers accept fractions such as "1/16"; lists are comma separated.
Config parse_config(std::istream& in, const std::string& name = "<config>");
/// Throws IoError when the file cannot be opened.
Config load_config(const std::string& path);

/// "0.25", "1/8", "-3e-2".
double parse_number(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

/// Re-runs every validation and recomputes the warnings.
void finalize_config(Config& c);

}  // namespace hvi

#endif  // HVI_CONFIG_HPP
