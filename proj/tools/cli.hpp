// Copyright 2026 The Borinot Control Authors
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

// Command-line front end. Exit codes: 0 success, 1 solver non-convergence
// or aborted experiment, 2 configuration error, 3 I/O error.

#ifndef BORINOT_TOOLS_CLI_HPP_
#define BORINOT_TOOLS_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace borinot::cli {

enum ExitCode : int {
  kOk = 0,
  kNotConverged = 1,
  kConfigError = 2,
  kIoError = 3,
};

/// 64-bit FNV-1a.
std::uint64_t Fnv1a(std::string_view data);

/// Inputs, outputs and settings of one invocation; written next to the
/// outputs as `<experiment>_<variant>.manifest.json`.
struct RunManifest {
  std::vector<std::string> command_line;
  std::map<std::string, std::string> input_hashes;  // path -> hex FNV-1a
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::map<std::string, std::string> versions;

  std::string Json() const;
};

/// Writes through a temporary file and a rename; throws on failure.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& content);

int RunCli(int argc, char** argv);

}  // namespace borinot::cli

#endif  // BORINOT_TOOLS_CLI_HPP_
