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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "twistkit/spectrum.hpp"

namespace twistkit {

/// A spectrum together with the symmetry acting on it.
struct TheoryConfig {
  ModeSpectrum spectrum;
  SymmetrySpec symmetry;
};

/// Parses the JSON config document.
///
///     {
///       "modes": [{"label": "k0", "omega": 0.693}],
///       "mu": 0.693,                                   // optional
///       "symmetry": {                                  // optional, default identity
///         "kind": "unitary",
///         "phases": [{"re": -1, "im": 0}]              // or {"angle": 3.14159}
///       }
///     }
///
/// An antiunitary symmetry lists, for every mode in order, the label it is
/// sent to: `{"kind": "antiunitary", "pairing": ["k1", "k0"], "phases": [...]}`.
/// Unknown fields are rejected. Throws ConfigError on malformed input and
/// AdmissibilityError on inadmissible spectra.
TheoryConfig parse_config(std::string_view json_text);

TheoryConfig load_config(const std::filesystem::path& path);

/// Serializes a config in the same schema (phases as {re, im}).
std::string dump_config(const TheoryConfig& config);

}  // namespace twistkit
