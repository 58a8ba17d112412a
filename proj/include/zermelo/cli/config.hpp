#pragma once
/**
 * @file   config.hpp
 * @brief  Run configuration of the command-line tool and its parsers.
 */

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "zermelo/problem.hpp"

namespace zermelo::cli
{
    /// Malformed or inconsistent configuration; maps to exit status 2.
    class ConfigError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    struct Segment
    {
        Position from;
        Position to;
    };

    struct RunConfig
    {
        std::string command;
        ProblemDefinition problem = make_historical ();
        std::optional<ExtendedState> state;
        std::optional<Position> q0;
        std::optional<double> t;
        std::size_t n = 256;
        std::optional<double> tol;
        double t_max = 5.0;
        std::optional<Segment> segment;
        std::filesystem::path out = ".";
    };

    /**
     * Problem from a preset name ("historical", "vortex" with k = 1), an inline
     * JSON descriptor {"family": ..., "k": ..., "a": ..., "b": ...} or the
     * path of a file holding one.
     */
    [[nodiscard]] ProblemDefinition parse_problem (const std::string& text);

    /// "c1,c2,heading"
    [[nodiscard]] ExtendedState parse_state (const std::string& text);
    /// "c1,c2"
    [[nodiscard]] Position parse_position (const std::string& text);
    /// "c1,c2:c1,c2"
    [[nodiscard]] Segment parse_segment (const std::string& text);

    /// Throws ConfigError unless tolerances are positive and grid sizes at least 8.
    void validate (const RunConfig& config);

} // namespace zermelo::cli
