// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace compagent::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_run_error = 1;
inline constexpr int exit_usage = 2;

/// Entry point behind main(); `args` excludes the program name.
auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

} // namespace compagent::cli
