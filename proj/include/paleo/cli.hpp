#ifndef PALEO_CLI_HPP
#define PALEO_CLI_HPP

namespace paleo {

inline constexpr const char* kToolVersion = "0.1.0";

// Full command dispatch; returns the process exit code.
// 0 success, 2 configuration or usage, 3 inconsistent inputs, 4 collapse.
int run_cli(int argc, const char* const* argv);

}  // namespace paleo

#endif
