#include "zermelo/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace zermelo::cli
{
    namespace
    {
        std::vector<double> parse_numbers (const std::string& text, std::size_t expected, const char* what)
        {
            std::vector<double> out;
            std::string item;
            std::istringstream in (text);
            while (std::getline (in, item, ','))
            {
                std::size_t used = 0;
                double v = 0.0;
                try
                {
                    v = std::stod (item, &used);
                }
                catch (const std::exception&)
                {
                    used = 0;
                }
                while (used < item.size () && std::isspace (static_cast<unsigned char> (item[used])))
                {
                    ++used;
                }
                if (item.empty () || used != item.size () || !std::isfinite (v))
                {
                    throw ConfigError ("cannot parse " + std::string (what) + " '" + text + "': bad number '" + item + "'");
                }
                out.push_back (v);
            }
            if (!text.empty () && text.back () == ',')
            {
                throw ConfigError ("cannot parse " + std::string (what) + " '" + text + "': trailing comma");
            }
            if (out.size () != expected)
            {
                throw ConfigError ("cannot parse " + std::string (what) + " '" + text + "': expected " + std::to_string (expected)
                                   + " comma-separated numbers");
            }
            return out;
        }

        ProblemDefinition from_json (const nlohmann::json& j)
        {
            if (!j.is_object () || !j.contains ("family") || !j["family"].is_string ())
            {
                throw ConfigError ("problem descriptor needs a string \"family\"");
            }
            auto number = [&] (const char* key, std::optional<double> fallback) {
                if (!j.contains (key))
                {
                    if (!fallback)
                    {
                        throw ConfigError (std::string ("problem descriptor is missing \"") + key + "\"");
                    }
                    return *fallback;
                }
                if (!j[key].is_number ())
                {
                    throw ConfigError (std::string ("problem field \"") + key + "\" must be a number");
                }
                return j[key].get<double> ();
            };
            const std::string family = j["family"].get<std::string> ();
            if (family == "historical")
            {
                return make_historical ();
            }
            if (family == "vortex")
            {
                return make_vortex (number ("k", 1.0));
            }
            if (family == "powerlaw")
            {
                return make_power_law (number ("k", 1.0), number ("a", std::nullopt), number ("b", std::nullopt));
            }
            throw ConfigError ("unknown problem family '" + family + "'");
        }
    } // namespace

    ProblemDefinition parse_problem (const std::string& text)
    {
        try
        {
            if (text == "historical")
            {
                return make_historical ();
            }
            if (text == "vortex")
            {
                return make_vortex (1.0);
            }
            if (!text.empty () && text.front () == '{')
            {
                return from_json (nlohmann::json::parse (text));
            }
            std::ifstream file (text);
            if (!file)
            {
                throw ConfigError ("unknown problem '" + text + "' (expected historical, vortex, JSON or a JSON file)");
            }
            return from_json (nlohmann::json::parse (file));
        }
        catch (const nlohmann::json::exception& e)
        {
            throw ConfigError (std::string ("invalid problem JSON: ") + e.what ());
        }
        catch (const Error& e)
        {
            throw ConfigError (e.what ());
        }
    }

    ExtendedState parse_state (const std::string& text)
    {
        const auto v = parse_numbers (text, 3, "state");
        return {v[0], v[1], v[2]};
    }

    Position parse_position (const std::string& text)
    {
        const auto v = parse_numbers (text, 2, "position");
        return {v[0], v[1]};
    }

    Segment parse_segment (const std::string& text)
    {
        const auto colon = text.find (':');
        if (colon == std::string::npos || text.find (':', colon + 1) != std::string::npos)
        {
            throw ConfigError ("cannot parse segment '" + text + "': expected c1,c2:c1,c2");
        }
        return {parse_position (text.substr (0, colon)), parse_position (text.substr (colon + 1))};
    }

    void validate (const RunConfig& config)
    {
        if (config.tol && !(*config.tol > 0.0))
        {
            throw ConfigError ("--tol must be positive");
        }
        if (config.t && !(*config.t >= 0.0))
        {
            throw ConfigError ("--t must be nonnegative");
        }
        if (!(config.t_max > 0.0))
        {
            throw ConfigError ("--t-max must be positive");
        }
        if (config.n < 8)
        {
            throw ConfigError ("--n must be at least 8");
        }
        auto check_point = [&] (Position q, const char* what) {
            if (!config.problem.in_domain (config.problem.radial (q)))
            {
                throw ConfigError (std::string (what) + " lies outside the problem domain");
            }
        };
        if (config.state)
        {
            check_point (config.state->position (), "--state");
        }
        if (config.q0)
        {
            check_point (*config.q0, "--q0");
        }
    }

} // namespace zermelo::cli
