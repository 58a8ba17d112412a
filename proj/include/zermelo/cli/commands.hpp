#pragma once
/**
 * @file   commands.hpp
 * @brief  Entry points of the zermelo-nav tool.
 *
 * Commands: classify, integrate, cusp, wavefront, ball, value, synthesis.
 * Exit status: 0 success, 2 configuration error, 3 numeric failure,
 * 4 I/O error.
 */

#include <ostream>

#include "zermelo/cli/config.hpp"

namespace zermelo::cli
{
    inline constexpr int kExitOk = 0;
    inline constexpr int kExitConfig = 2;
    inline constexpr int kExitNumeric = 3;
    inline constexpr int kExitIo = 4;

    /// Parses the command line and runs the selected command.
    [[nodiscard]] int run (int argc, const char* const* argv, std::ostream& out, std::ostream& err);

    /// Runs an already parsed configuration.
    [[nodiscard]] int run_command (const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace zermelo::cli
