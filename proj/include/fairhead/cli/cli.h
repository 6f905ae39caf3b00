/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FAIRHEAD_CLI_CLI_H_
#define FAIRHEAD_CLI_CLI_H_

#include <string>
#include <vector>

namespace fairhead::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point for the `fairhead` tool. Subcommands: synth, detect, train,
// evaluate, mitigate, active-learn, tune, report. Returns 0 on success, 1 on
// usage errors and 2 on data errors.
int CliMain(int argc, const char* const* argv);

// Same, with argv[0] omitted.
int RunCli(const std::vector<std::string>& args);

}  // namespace fairhead::cli

#endif  // FAIRHEAD_CLI_CLI_H_
