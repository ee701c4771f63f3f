#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace tame::cli {

/// Runs the command line `args` (without the program name). Reports go to
/// out, diagnostics to err. Returns the process exit code: 0 on success, 1
/// when a command fails or a certificate check does not hold, 2 on usage
/// errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes a single command object {"command": name, ...} against a
/// manifest. The report is {"command", "status": "ok"|"failed", "result"}
/// plus "error" when status is failed.
nlohmann::json execute(const nlohmann::json& manifest, const nlohmann::json& command, unsigned field_char,
                       unsigned long long seed);

}  // namespace tame::cli
