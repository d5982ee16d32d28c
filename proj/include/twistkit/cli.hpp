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

#include <ostream>
#include <string>
#include <vector>

namespace twistkit::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kAssertionFailed = 1,
  kInvalidInput = 2,
  kCapacityExceeded = 3,
};

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Tables go to `out` unless an output path is given; diagnostics
/// and warnings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// %.16e: 17 significant digits, lowercase exponent.
std::string format_double(double value);

}  // namespace twistkit::cli
