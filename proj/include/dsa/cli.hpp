// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace dsa {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitModel = 4;

// Entry point of the `dsa` command line tool. Verbs: pattern, sweep, miso,
// mimo, validate.
int run_cli(int argc, char** argv);

}  // namespace dsa
