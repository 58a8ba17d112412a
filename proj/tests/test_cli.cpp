#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "zermelo/cli/commands.hpp"
#include "zermelo/cli/config.hpp"
#include "zermelo/cli/output.hpp"

using namespace zermelo;
using namespace zermelo::cli;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        int code;
        std::string out;
        std::string err;
    };

    Outcome invoke (std::vector<std::string> args)
    {
        args.insert (args.begin (), "zermelo-nav");
        std::vector<const char*> argv;
        for (const auto& a : args)
        {
            argv.push_back (a.c_str ());
        }
        std::ostringstream out;
        std::ostringstream err;
        const int code = run (static_cast<int> (argv.size ()), argv.data (), out, err);
        return {code, out.str (), err.str ()};
    }

    fs::path scratch (const std::string& name)
    {
        const fs::path dir = fs::temp_directory_path () / ("zermelo_cli_" + name);
        fs::remove_all (dir);
        fs::create_directories (dir);
        return dir;
    }

    std::string slurp (const fs::path& path)
    {
        std::ifstream is (path, std::ios::binary);
        return {std::istreambuf_iterator<char> (is), std::istreambuf_iterator<char> ()};
    }

    std::vector<std::string> lines (const std::string& text)
    {
        std::vector<std::string> v;
        std::istringstream is (text);
        for (std::string line; std::getline (is, line);)
        {
            v.push_back (line);
        }
        return v;
    }
} // namespace

TEST_CASE ("problem parsing")
{
    CHECK (parse_problem ("historical").family () == Family::Historical);
    const auto v = parse_problem ("vortex");
    CHECK (v.family () == Family::Vortex);
    CHECK (v.mu (1.0) == doctest::Approx (1.0));

    const auto v2 = parse_problem (R"({"family": "vortex", "k": 2.5})");
    CHECK (v2.mu (1.0) == doctest::Approx (2.5));
    const auto pl = parse_problem (R"({"family": "powerlaw", "k": 2, "a": -1, "b": 1})");
    CHECK (pl.family () == Family::PowerLaw);
    CHECK (pl.mu (2.0) == doctest::Approx (1.0));

    const fs::path file = scratch ("problem") / "p.json";
    std::ofstream (file) << R"({"family": "vortex", "k": 3})";
    CHECK (parse_problem (file.string ()).mu (1.0) == doctest::Approx (3.0));

    CHECK_THROWS_AS ((void)parse_problem ("tornado"), ConfigError);
    CHECK_THROWS_AS ((void)parse_problem (R"({"family": "powerlaw", "k": 1})"), ConfigError);
    CHECK_THROWS_AS ((void)parse_problem (R"({"family": "vortex", "k": -1})"), ConfigError);
    CHECK_THROWS_AS ((void)parse_problem ("{not json"), ConfigError);
}

TEST_CASE ("state, position and segment parsing")
{
    const ExtendedState s = parse_state ("0.5,-2,3.1");
    CHECK (s.c1 == 0.5);
    CHECK (s.c2 == -2.0);
    CHECK (s.heading == 3.1);
    const Position q = parse_position (" 1 , 2 ");
    CHECK (q.c1 == 1.0);
    CHECK (q.c2 == 2.0);
    const Segment seg = parse_segment ("0,1:2,3");
    CHECK (seg.from.c1 == 0.0);
    CHECK (seg.to.c2 == 3.0);

    for (const char* bad : {"", "1,2", "1,2,3,4", "a,b,c", "1,,2", "1,2,nan"})
    {
        CHECK_THROWS_AS ((void)parse_state (bad), ConfigError);
    }
    CHECK_THROWS_AS ((void)parse_position ("1"), ConfigError);
    CHECK_THROWS_AS ((void)parse_segment ("0,1;2,3"), ConfigError);
}

TEST_CASE ("configuration validation")
{
    RunConfig c;
    c.command = "wavefront";
    c.q0 = Position{0.0, 2.0};
    c.t = 1.0;
    CHECK_NOTHROW (validate (c));
    c.n = 4;
    CHECK_THROWS_AS (validate (c), ConfigError);
    c.n = 64;
    c.tol = 0.0;
    CHECK_THROWS_AS (validate (c), ConfigError);
    c.tol.reset ();
    c.t = -1.0;
    CHECK_THROWS_AS (validate (c), ConfigError);
    c.t = 1.0;
    c.problem = make_vortex (1.0);
    c.q0 = Position{-1.0, 0.0};
    CHECK_THROWS_AS (validate (c), ConfigError);
}

TEST_CASE ("number formatting")
{
    CHECK (fmt (0.1) == "0.10000000000000001");
    CHECK (fmt (std::nan ("")) == "NA");
    CHECK (fmt (std::optional<double> ()) == "NA");
    CHECK (std::stod (fmt (std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE ("classify command")
{
    const Outcome h = invoke ({"classify", "--state", "0,2,0"});
    REQUIRE (h.code == kExitOk);
    CHECK (h.out.find ("\"class\": \"hyperbolic\"") != std::string::npos);
    const Outcome e = invoke ({"classify", "--state", "0,2,3.14159"});
    CHECK (e.out.find ("\"class\": \"elliptic\"") != std::string::npos);
    const Outcome neg = invoke ({"classify", "--state=-1,2,0"});
    CHECK (neg.code == kExitOk);
}

TEST_CASE ("exit codes")
{
    CHECK (invoke ({"classify", "--state", "0,2"}).code == kExitConfig);
    CHECK (invoke ({"classify"}).code == kExitConfig);
    CHECK (invoke ({"frobnicate"}).code == kExitConfig);
    CHECK (invoke ({"classify", "--state", "0,2,0", "--tol", "-1"}).code == kExitConfig);
    CHECK (invoke ({"classify", "--state", "0,2,0", "--problem", "nowhere.json"}).code == kExitConfig);
    CHECK (invoke ({"--help"}).code == kExitOk);
    // Weak current has no cusps to synthesize around.
    CHECK (invoke ({"synthesis", "--q0", "0,0.5", "--out", scratch ("weak").string ()}).code == kExitConfig);
    // Cusp of a state that is not abnormal.
    CHECK (invoke ({"cusp", "--state", "0,2,0", "--out", scratch ("notabn").string ()}).code == kExitConfig);
    // Output directory that cannot be created.
    CHECK (invoke ({"integrate", "--state", "0,2,0", "--t", "1", "--out", "/proc/zermelo/x"}).code == kExitIo);
}

TEST_CASE ("integrate writes a trajectory with residuals")
{
    const fs::path dir = scratch ("integrate");
    const Outcome o = invoke ({"integrate", "--state", "0,2,0.4", "--t", "2", "--out", dir.string ()});
    REQUIRE (o.code == kExitOk);
    const auto rows = lines (slurp (dir / "trajectory.csv"));
    REQUIRE (rows.size () > 10);
    CHECK (rows.front () == "t,x,y,gamma,res_H,res_eq10,res_C0");
    CHECK (fs::exists (dir / "trajectory.svg"));
    CHECK (fs::exists (dir / "strong_boundary.csv"));
    // A geodesic falling into the vortex centre is reported but is not an error.
    const fs::path vdir = scratch ("integrate_v");
    const Outcome v = invoke ({"integrate", "--problem", "vortex", "--state", "0.5,0,3.14159", "--t", "5", "--out", vdir.string ()});
    CHECK (v.code == kExitOk);
    CHECK (lines (slurp (vdir / "trajectory.csv")).front () == "t,r,theta,alpha,res_H,res_eq10,res_C0");
}

TEST_CASE ("cusp command")
{
    const fs::path dir = scratch ("cusp");
    const Outcome o = invoke ({"cusp", "--state=0,2,-2.0944", "--out", dir.string ()});
    REQUIRE (o.code == kExitOk);
    const std::string json = slurp (dir / "cusp.json");
    CHECK (json.find ("\"t_cusp\": 1.7320508075688") != std::string::npos);
    CHECK (json.find ("\"source\": \"analytic\"") != std::string::npos);
    CHECK (fs::exists (dir / "cusp.svg"));

    // The branch without a forward cusp reports nulls.
    const fs::path none = scratch ("cusp_none");
    const Outcome n = invoke ({"cusp", "--state", "0,2,2.0944", "--out", none.string ()});
    REQUIRE (n.code == kExitOk);
    CHECK (slurp (none / "cusp.json").find ("\"t_cusp\": null") != std::string::npos);
}

TEST_CASE ("wavefront has one row per heading")
{
    const fs::path dir = scratch ("wavefront");
    const Outcome o = invoke ({"wavefront", "--q0", "0,2", "--t", "1", "--n", "256", "--out", dir.string ()});
    REQUIRE (o.code == kExitOk);
    const auto rows = lines (slurp (dir / "wavefront.csv"));
    REQUIRE (rows.size () == 257);
    CHECK (rows.front () == "gamma0,x,y,class,is_sphere");
    CHECK (fs::exists (dir / "wavefront.svg"));
}

TEST_CASE ("value command reports jumps")
{
    const fs::path dir = scratch ("value");
    const Outcome o = invoke ({"value", "--q0", "0,0.5", "--segment", "0.3,0.9:0.3,0.1", "--n", "40", "--out", dir.string ()});
    REQUIRE (o.code == kExitOk);
    const auto rows = lines (slurp (dir / "value.csv"));
    REQUIRE (rows.size () == 41);
    CHECK (rows.front () == "s,x,y,T,gamma0_star,flag");
    CHECK (slurp (dir / "jumps.json").find ("\"jumps\": []") != std::string::npos);
}

TEST_CASE ("runs are byte-identical")
{
    const fs::path a = scratch ("det_a");
    const fs::path b = scratch ("det_b");
    for (const fs::path& dir : {a, b})
    {
        REQUIRE (invoke ({"ball", "--q0", "0,2", "--t", "0.5", "--n", "64", "--out", dir.string ()}).code == kExitOk);
    }
    for (const char* name : {"wavefront.csv", "geodesics.csv", "abnormal_arcs.csv", "ball.svg"})
    {
        CHECK (slurp (a / name) == slurp (b / name));
    }
}
