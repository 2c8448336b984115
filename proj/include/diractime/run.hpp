#pragma once

#include <functional>
#include <iosfwd>

#include "diractime/config.hpp"

namespace diractime {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitGuard = 2,
    kExitSelfcheck = 3,
};

/// Executes one mode and writes its artifacts: the CSV at cfg.out and, for
/// evolve/uncertainty/tunneling, a key=value summary at cfg.out + ".summary"
/// (echoed to `log`). Errors are reported on `err` and mapped to exit codes.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Runs `body` and maps library exceptions to exit codes, printing the message.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace diractime
