#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "zermelo/problem.hpp"

using namespace zermelo;
using std::numbers::pi;

TEST_CASE ("normalize_angle maps into (-pi, pi]")
{
    CHECK (normalize_angle (pi) == doctest::Approx (pi));
    CHECK (normalize_angle (-pi) == doctest::Approx (pi));
    CHECK (normalize_angle (3 * pi / 2) == doctest::Approx (-pi / 2));
    CHECK (normalize_angle (-7.0) == doctest::Approx (-7.0 + 2 * pi));

    oracle::Rng rng (11);
    for (int i = 0; i < 2000; ++i)
    {
        const double a = rng.uniform (-50.0, 50.0);
        const double w = normalize_angle (a);
        REQUIRE (w > -pi);
        REQUIRE (w <= pi);
        const double turns = (a - w) / (2 * pi);
        REQUIRE (std::abs (turns - std::round (turns)) < 1e-12);
    }
}

TEST_CASE ("profiles match their formulas")
{
    const auto h = make_historical ();
    CHECK (h.chart () == Chart::HistoricalCartesian);
    CHECK (h.m (-3.0) == 1.0);
    CHECK (h.mu (-3.0) == -3.0);
    CHECK (h.dmu (0.7) == 1.0);
    CHECK (h.dm (0.7) == 0.0);

    const auto v = make_vortex (2.0);
    CHECK (v.chart () == Chart::PolarLike);
    CHECK (v.m (0.5) == doctest::Approx (0.5));
    CHECK (v.mu (0.5) == doctest::Approx (8.0));
    CHECK (v.dmu (0.5) == doctest::Approx (-32.0));

    const auto pl = make_power_law (1.5, -1.0, 2.0);
    for (double r : {0.3, 1.0, 2.7})
    {
        CHECK (pl.m (r) == doctest::Approx (r * r));
        CHECK (pl.dm (r) == doctest::Approx (2 * r));
        CHECK (pl.mu (r) == doctest::Approx (1.5 / r));
        CHECK (pl.dmu (r) == doctest::Approx (-1.5 / (r * r)));
    }
}

TEST_CASE ("profile derivatives agree with finite differences")
{
    oracle::Rng rng (3);
    const ProblemDefinition problems[] = {make_historical (), make_vortex (1.3), make_power_law (0.8, 0.5, 1.5),
                                          make_power_law (2.0, -3.0, 1.0)};
    for (const auto& p : problems)
    {
        for (int i = 0; i < 200; ++i)
        {
            const double r = rng.uniform (0.2, 3.0);
            const double h = 1e-6 * r;
            const double dm = (p.m (r + h) - p.m (r - h)) / (2 * h);
            const double dmu = (p.mu (r + h) - p.mu (r - h)) / (2 * h);
            REQUIRE (p.dm (r) == doctest::Approx (dm).epsilon (1e-7));
            REQUIRE (p.dmu (r) == doctest::Approx (dmu).epsilon (1e-7));
        }
    }
}

TEST_CASE ("domain checks")
{
    const auto v = make_vortex (1.0);
    CHECK_FALSE (v.in_domain (0.0));
    CHECK_FALSE (v.in_domain (-1.0));
    CHECK (v.in_domain (1e-9));
    CHECK_THROWS_AS ((void)v.profile (0.0), Error);
    try
    {
        (void)v.profile (-1.0);
    }
    catch (const Error& e)
    {
        CHECK (e.code () == ErrorCode::DomainError);
    }
    CHECK (make_historical ().in_domain (-1e6));

    CHECK_THROWS_AS ((void)make_vortex (0.0), Error);
    CHECK_THROWS_AS ((void)make_vortex (-1.0), Error);
    CHECK_THROWS_AS ((void)make_power_law (1.0, std::nan (""), 1.0), Error);
}

TEST_CASE ("current norm and strong/weak boundary")
{
    const auto h = make_historical ();
    CHECK (current_norm (h, 2.0) == doctest::Approx (2.0));
    CHECK (current_norm (h, -0.5) == doctest::Approx (0.5));
    const auto hb = strong_current_boundary (h);
    REQUIRE (hb.size () == 2);
    for (double r : hb)
    {
        CHECK (current_norm (h, r) == doctest::Approx (1.0));
    }

    const auto v = make_vortex (2.5);
    CHECK (current_norm (v, 1.0) == doctest::Approx (2.5));
    REQUIRE (strong_current_boundary (v).size () == 1);
    CHECK (strong_current_boundary (v)[0] == doctest::Approx (2.5));

    const auto pl = make_power_law (3.0, 1.0, 0.5);
    const auto pb = strong_current_boundary (pl);
    REQUIRE (pb.size () == 1);
    CHECK (current_norm (pl, pb[0]) == doctest::Approx (1.0));

    CHECK (strong_current_boundary (make_power_law (2.0, -1.0, 1.0)).empty ());
}

TEST_CASE ("chart conversions round-trip")
{
    oracle::Rng rng (5);
    const ProblemDefinition problems[] = {make_historical (), make_vortex (1.0)};
    for (const auto& p : problems)
    {
        for (int i = 0; i < 500; ++i)
        {
            const ExtendedState s (rng.uniform (0.1, 3.0), rng.uniform (-3.0, 3.0), rng.uniform (-pi, pi));
            const ExtendedState back = p.from_canonical (p.to_canonical (s));
            REQUIRE (back.c1 == doctest::Approx (s.c1));
            REQUIRE (back.c2 == doctest::Approx (s.c2));
            REQUIRE (std::abs (normalize_angle (back.heading - s.heading)) < 1e-12);
        }
    }

    const auto h = make_historical ();
    const CanonicalState c = h.to_canonical ({1.0, 2.0, 0.25});
    CHECK (c.r == 2.0);
    CHECK (c.theta == 1.0);
    CHECK (c.alpha == doctest::Approx (pi / 2 - 0.25));
    CHECK (h.radial ({1.0, 2.0}) == 2.0);
    CHECK (make_vortex (1.0).radial ({1.5, 2.0}) == 1.5);
}

TEST_CASE ("chart difference wraps the angle only in polar charts")
{
    const auto v = make_vortex (1.0);
    const Position d = chart_difference (v, {1.0, 3.1}, {1.0, -3.1});
    CHECK (d.c2 == doctest::Approx (6.2 - 2 * pi));
    CHECK (chart_distance (v, {1.0, pi}, {1.0, -pi}) == doctest::Approx (0.0));

    const auto h = make_historical ();
    CHECK (chart_difference (h, {3.1, 1.0}, {-3.1, 1.0}).c1 == doctest::Approx (6.2));
}
