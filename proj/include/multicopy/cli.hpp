// Command-line front end. Exit codes: 0 success, 1 validation error,
// 2 I/O error.
#pragma once

namespace multicopy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

int run_cli(int argc, char** argv);

}  // namespace multicopy::cli
