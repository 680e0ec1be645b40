#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "saferust/config.hpp"

namespace saferust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

// Defaults, then the file (when given), then flag overrides.
AppConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const ConfigOverrides& overrides);

// Parses argv and runs one subcommand. Data goes to `out`, diagnostics to
// `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace saferust::cli
