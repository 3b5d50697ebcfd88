#pragma once
// Batch front-end. Every subcommand writes CSV (header row, 17 significant digits, comma
// separated, LF line endings) to --out or standard output.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration or usage error,
// 3 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

#include "hsflow/flux.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

struct RunConfig {
    FluxSpec flux;
    QuadSpec quad;
};

/// Parses {"a", "shape": "single"|"dipole", "n", "quad": {"rel_tol", "abs_tol", "max_depth"}};
/// any other key, a wrong type or a violated invariant is a ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Formats with 17 significant digits.
std::string csv_number(double v);

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsflow
