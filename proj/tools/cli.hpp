#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rrcrt::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kOracleMismatch = 3 };

/// Entry point minus argv[0]. `tty` enables color for text tables
/// (still subject to NO_COLOR).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool tty = false);

}  // namespace rrcrt::cli
