#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hhcert/funcspec.hpp"
#include "hhcert/report.hpp"

namespace hhcert::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Builds an (unvalidated) spec from the JSON config object. Unknown keys,
/// wrong types and unparsable expressions throw ConfigError.
ProblemSpec spec_from_json(const nlohmann::json& j, const std::string& default_id = "spec");

ProblemSpec load_config(const std::filesystem::path& path);

/// validate -> certify f and |f'|^q -> integral identity -> bounds -> report.
/// With `certify` false every certificate is reported as not checked.
BoundReport run_check(const ProblemSpec& spec, bool certify, std::ostream* diagnostics = nullptr);

/// Both forms of the phi(t) = t Hoelder specialisation, for --diagnostics.
void print_holder_variants(const ProblemSpec& spec, std::ostream& os);

/// The built-in corpus, sorted by id. Moduli are derived from grid estimates
/// of c* for f and |f'|^q (fractions 0, 1/2, 1).
std::vector<ProblemSpec> builtin_corpus();

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2 };

/// Entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hhcert::cli
