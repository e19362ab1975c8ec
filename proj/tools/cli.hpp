/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef T2T_TOOLS_CLI_HPP_
#define T2T_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "t2t/errors.hpp"

namespace t2t::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitShape = 5;

int ExitCodeFor(ErrorCategory category);

// Runs one subcommand. `args` excludes the program name. Progress and the
// single-line error report go to `log`.
int Run(const std::vector<std::string>& args, std::ostream& log);

}  // namespace t2t::cli

#endif  // T2T_TOOLS_CLI_HPP_
