// Copyright (c) 2026 The twistkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "twistkit/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "twistkit/errors.hpp"

namespace twistkit {

using nlohmann::json;

namespace {

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (auto name : allowed) known = known || key == name;
    if (!known) {
      throw ConfigError("unknown field '" + key + "' in " + std::string(where));
    }
  }
}

const json& require(const json& object, const char* key, std::string_view where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ConfigError("missing field '" + std::string(key) + "' in " + std::string(where));
  }
  return *it;
}

double number(const json& value, std::string_view what) {
  if (!value.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return value.get<double>();
}

Complex parse_phase(const json& value) {
  if (!value.is_object()) throw ConfigError("phase must be an object {re, im} or {angle}");
  if (value.contains("angle")) {
    reject_unknown(value, {"angle"}, "phase");
    return std::polar(1.0, number(value["angle"], "phase angle"));
  }
  reject_unknown(value, {"re", "im"}, "phase");
  return {number(require(value, "re", "phase"), "phase.re"),
          number(require(value, "im", "phase"), "phase.im")};
}

std::vector<Complex> parse_phases(const json& value) {
  if (!value.is_array()) throw ConfigError("symmetry.phases must be an array");
  std::vector<Complex> out;
  for (const auto& entry : value) out.push_back(parse_phase(entry));
  return out;
}

SymmetrySpec parse_symmetry(const json& value, const ModeSpectrum& spectrum) {
  if (!value.is_object()) throw ConfigError("symmetry must be an object");
  const auto& kind = require(value, "kind", "symmetry");
  if (!kind.is_string()) throw ConfigError("symmetry.kind must be a string");
  const auto name = kind.get<std::string>();
  if (name == "unitary") {
    reject_unknown(value, {"kind", "phases"}, "unitary symmetry");
    return UnitarySymmetry{parse_phases(require(value, "phases", "symmetry"))};
  }
  if (name == "antiunitary") {
    reject_unknown(value, {"kind", "pairing", "phases"}, "antiunitary symmetry");
    const auto& pairing = require(value, "pairing", "symmetry");
    if (!pairing.is_array()) throw ConfigError("symmetry.pairing must be an array of labels");
    AntiunitarySymmetry sym;
    for (const auto& target : pairing) {
      if (!target.is_string()) throw ConfigError("symmetry.pairing entries must be labels");
      auto index = spectrum.index_of(target.get<std::string>());
      if (!index) {
        throw ConfigError("symmetry.pairing names unknown mode '" + target.get<std::string>() + "'");
      }
      sym.pairing.push_back(*index);
    }
    sym.phases = parse_phases(require(value, "phases", "symmetry"));
    return sym;
  }
  throw ConfigError("symmetry.kind must be \"unitary\" or \"antiunitary\", got \"" + name + "\"");
}

}  // namespace

TheoryConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, {"modes", "mu", "symmetry"}, "config");

  const auto& modes = require(doc, "modes", "config");
  if (!modes.is_array()) throw ConfigError("modes must be an array");
  std::vector<Mode> raw;
  for (const auto& entry : modes) {
    if (!entry.is_object()) throw ConfigError("each mode must be an object {label, omega}");
    reject_unknown(entry, {"label", "omega"}, "mode");
    const auto& label = require(entry, "label", "mode");
    if (!label.is_string()) throw ConfigError("mode label must be a string");
    raw.push_back({label.get<std::string>(), number(require(entry, "omega", "mode"), "mode omega")});
  }
  std::optional<double> mu;
  if (doc.contains("mu")) mu = number(doc["mu"], "mu");

  TheoryConfig config;
  config.spectrum = validate_spectrum(std::move(raw), mu);
  config.symmetry = doc.contains("symmetry") ? parse_symmetry(doc["symmetry"], config.spectrum)
                                             : SymmetrySpec{identity_symmetry(config.spectrum.size())};
  validate_symmetry(config.spectrum, config.symmetry);
  return config;
}

TheoryConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const TheoryConfig& config) {
  json doc;
  doc["modes"] = json::array();
  for (const auto& mode : config.spectrum.modes()) {
    doc["modes"].push_back({{"label", mode.label}, {"omega", mode.omega}});
  }
  if (config.spectrum.mu()) doc["mu"] = *config.spectrum.mu();

  auto phases_json = [](const std::vector<Complex>& phases) {
    json out = json::array();
    for (const auto& p : phases) out.push_back({{"re", p.real()}, {"im", p.imag()}});
    return out;
  };
  if (const auto* u = std::get_if<UnitarySymmetry>(&config.symmetry)) {
    doc["symmetry"] = {{"kind", "unitary"}, {"phases", phases_json(u->phases)}};
  } else {
    const auto& v = std::get<AntiunitarySymmetry>(config.symmetry);
    json pairing = json::array();
    for (auto target : v.pairing) pairing.push_back(config.spectrum[target].label);
    doc["symmetry"] = {{"kind", "antiunitary"}, {"pairing", pairing}, {"phases", phases_json(v.phases)}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace twistkit
