#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace osmoguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAlarm = 1;   // monitor: at least one alarm fired
inline constexpr int kExitConfig = 2;  // bad arguments or configuration
inline constexpr int kExitIo = 3;

// Default config file path when --config is not given.
inline constexpr const char* kConfigEnv = "OSMOGUARD_CONFIG";

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace osmoguard::cli
