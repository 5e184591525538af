#pragma once

#include <ostream>
#include <span>
#include <string>

namespace dsfusion {

// Entry point of the `dsfusion` tool; `args` excludes the program name.
// Returns 0 on success, 2 for usage/config errors and missing files, 1 for
// any other failure.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dsfusion
