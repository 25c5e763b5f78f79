#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pram {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIo = 4;

/// Entry point shared by the binary and the tests. args excludes argv[0].
/// Returns the process exit code: 0 success, 2 validation failure,
/// 3 infeasible plan, 4 I/O failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace pram
