#pragma once

// Command implementations behind tools/flowrefine. Each returns the process
// exit status: 0 success, 1 premise or verification failure, 2 usage or
// parse error.

#include <iosfwd>
#include <optional>
#include <string>

#include "flowrefine/case_study.hpp"
#include "flowrefine/document.hpp"

namespace flowrefine {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

struct CommandOptions {
    BoundsOverride bounds;
    bool json = false;
    /// apply-script: where to write the refined architecture (stdout if unset).
    std::optional<std::string> output;
    /// apply-script and case-study: re-check every step semantically.
    bool verify = false;
    /// case-study: DEC without ρ.
    bool mutant = false;
};

int cmd_validate(const std::string& arch_path, const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& arch_path, const std::string& env_path, const CommandOptions& opt,
                 std::ostream& out, std::ostream& err);
/// Exit 0 iff the system in `refined_path` refines the one in `original_path`.
int cmd_check(const std::string& original_path, const std::string& refined_path, const CommandOptions& opt,
              std::ostream& out, std::ostream& err);
int cmd_apply(const std::string& arch_path, const std::string& script_path, const CommandOptions& opt,
              std::ostream& out, std::ostream& err);
int cmd_case_study(const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Canonical text listing of simulation runs.
std::string render_runs(const std::vector<NamedStreamTuple>& runs);

/// JSON report schema (see README.md).
std::string report_json(const PremiseReport& report);
std::string inclusion_json(const InclusionResult& r);

} // namespace flowrefine
