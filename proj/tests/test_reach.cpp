#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "zermelo/reach.hpp"

using namespace zermelo;
using std::numbers::pi;

namespace
{
    const Position kStrong{0.0, 2.0};
    const Position kWeak{0.0, 0.5};

    const ShootingTable& strong_table ()
    {
        static const ShootingTable table (make_historical (), kStrong);
        return table;
    }

    const ShootingTable& weak_table ()
    {
        static const ShootingTable table (make_historical (), kWeak);
        return table;
    }

    double dist (Position a, Position b) { return std::hypot (a.c1 - b.c1, a.c2 - b.c2); }
} // namespace

TEST_CASE ("heading grid")
{
    const auto p = make_historical ();
    const auto weak = heading_grid (p, kWeak, 8);
    REQUIRE (weak.size () == 8);
    for (std::size_t i = 0; i < 8; ++i)
    {
        CHECK (weak[i] == doctest::Approx (-pi + 2 * pi * (i + 1) / 8));
    }

    for (std::size_t n : {8u, 64u, 720u})
    {
        const auto g = heading_grid (p, kStrong, n);
        REQUIRE (g.size () == n);
        REQUIRE (std::is_sorted (g.begin (), g.end ()));
        CHECK (g.front () > -pi);
        CHECK (g.back () <= pi);
        for (double h : abnormal_headings (p, 2.0))
        {
            CHECK (std::find (g.begin (), g.end (), h) != g.end ());
        }
    }
    CHECK_THROWS_AS ((void)heading_grid (p, kStrong, 2), Error);
    CHECK_THROWS_AS ((void)heading_grid (make_vortex (1.0), {-1.0, 0.0}, 16), Error);
}

TEST_CASE ("wavefront points are exponential-map images")
{
    const auto p = make_historical ();
    const Wavefront zero = wavefront (p, kStrong, 0.0, 16);
    for (const auto& pt : zero.points)
    {
        CHECK (pt.position.c1 == 0.0);
        CHECK (pt.position.c2 == 2.0);
    }

    const Wavefront front = wavefront (p, kStrong, 0.3, 64);
    REQUIRE (front.points.size () == 64);
    for (const auto& pt : front.points)
    {
        REQUIRE (pt.valid);
        const auto ref = oracle::historical_flow (0.0, 2.0, pt.heading0, 0.3);
        REQUIRE (std::abs (pt.position.c1 - ref[0]) < 1e-9);
        REQUIRE (std::abs (pt.position.c2 - ref[1]) < 1e-9);
        REQUIRE (pt.kind == classify (p, {kStrong, pt.heading0}).kind);
    }

    // Geodesics falling into the vortex centre are marked invalid.
    const Wavefront v = wavefront (make_vortex (1.0), {0.3, 0.0}, 2.0, 32);
    CHECK (std::any_of (v.points.begin (), v.points.end (), [] (const WavefrontPoint& q) { return !q.valid; }));
}

TEST_CASE ("winding number")
{
    Wavefront square{1.0, {}, {}};
    for (Position q : {Position{-1, -1}, Position{1, -1}, Position{1, 1}, Position{-1, 1}})
    {
        square.points.push_back ({0.0, q, ExtremalKind::Hyperbolic, true});
    }
    CHECK (winding_number (square, {0.0, 0.0}) == 1);
    CHECK (winding_number (square, {2.0, 0.0}) == 0);
    std::reverse (square.points.begin (), square.points.end ());
    CHECK (winding_number (square, {0.0, 0.0}) == -1);

    const auto p = make_historical ();
    // Weak current: small fronts surround q0. Strong current: q0 lies outside the fan.
    CHECK (std::abs (winding_number (wavefront (p, kWeak, 0.1, 64), kWeak)) == 1);
    CHECK (winding_number (wavefront (p, kStrong, 0.1, 64), kStrong) == 0);
}

TEST_CASE ("value function re-integration closure")
{
    const auto p = make_historical ();
    oracle::Rng rng (71);
    int reachable = 0;
    for (int i = 0; i < 40; ++i)
    {
        const bool strong = i % 2 == 0;
        const Position q0 = strong ? kStrong : kWeak;
        const Position target{q0.c1 + rng.uniform (-0.8, 0.8), q0.c2 + rng.uniform (-0.8, 0.8)};
        const ValueSample v = (strong ? strong_table () : weak_table ()).value (target);
        if (!v.reachable ())
        {
            continue;
        }
        ++reachable;
        REQUIRE (*v.t_min >= 0.0);
        REQUIRE (*v.t_min <= 5.0);
        const auto end = oracle::historical_flow (q0.c1, q0.c2, v.heading0_star, *v.t_min, 1e-4);
        REQUIRE (dist ({end[0], end[1]}, target) <= 1e-8 * 1.01);
    }
    CHECK (reachable > 20);
}

TEST_CASE ("upper bound and monotone balls")
{
    const auto p = make_historical ();
    const ShootingTable& table = strong_table ();
    for (double t : {0.2, 0.5})
    {
        const Wavefront front = wavefront (p, kStrong, t, 48);
        for (const auto& pt : front.points)
        {
            const ValueSample v = table.value (pt.position);
            REQUIRE (v.reachable ());
            REQUIRE (*v.t_min <= t + 1e-9);
        }
    }
    const SphereAndBall small = sphere_and_ball (p, kStrong, 0.2, 48);
    for (std::size_t i = 0; i < small.front.points.size (); ++i)
    {
        if (small.is_sphere[i])
        {
            const ValueSample v = table.value (small.front.points[i].position);
            REQUIRE (*v.t_min <= 0.3);
        }
    }
}

TEST_CASE ("value at the origin and outside the domain")
{
    CHECK (*strong_table ().value (kStrong).t_min == 0.0);
    const ShootingTable vortex (make_vortex (1.0), {1.5, 0.0}, {.n_headings = 64, .t_max = 1.0, .time_step = 0.05});
    CHECK_FALSE (vortex.value ({-0.5, 0.0}).reachable ());
    CHECK_THROWS_AS (ShootingTable (make_historical (), kStrong, {.t_max = 0.0}), Error);
}

TEST_CASE ("targets on the abnormal arc arrive via the abnormal")
{
    const double g0 = -2 * pi / 3;
    const auto a = oracle::historical_flow (0.0, 2.0, g0, 0.8);
    const ValueSample v = strong_table ().value ({a[0], a[1]});
    REQUIRE (v.reachable ());
    CHECK (*v.t_min == doctest::Approx (0.8).epsilon (1e-6));
    CHECK (v.flag == ArrivalKind::ViaAbnormal);
    CHECK (std::abs (v.heading0_star - g0) < 1e-5);

    const ValueSample inside = strong_table ().value ({0.5, 2.0});
    CHECK (inside.flag == ArrivalKind::Interior);
}

TEST_CASE ("sphere and ball in strong current")
{
    const auto p = make_historical ();
    const SphereAndBall sb = sphere_and_ball (p, kStrong, 0.3, 64);
    REQUIRE (sb.front.points.size () == 64);
    REQUIRE (sb.arcs.size () == 2);
    std::size_t sphere = 0;
    for (std::size_t i = 0; i < 64; ++i)
    {
        const auto kind = sb.front.points[i].kind;
        if (sb.is_sphere[i])
        {
            ++sphere;
            REQUIRE (kind == ExtremalKind::Hyperbolic);
        }
        else
        {
            REQUIRE (kind != ExtremalKind::Hyperbolic);
        }
    }
    CHECK (sphere > 10);
    for (const auto& arc : sb.arcs)
    {
        CHECK (arc.samples.back ().t == doctest::Approx (0.3));
        CHECK (classify (p, arc.samples.front ().state).kind == ExtremalKind::Abnormal);
        CHECK_FALSE (arc.cusp.has_value ());
    }
    // Weak current: no abnormal arcs and the whole front is the sphere.
    const SphereAndBall weak = sphere_and_ball (p, kWeak, 0.2, 32);
    CHECK (weak.arcs.empty ());
    CHECK (std::all_of (weak.is_sphere.begin (), weak.is_sphere.end (), [] (bool b) { return b; }));
}

TEST_CASE ("polyline self-intersections")
{
    GeodesicTrajectory line;
    for (int i = 0; i <= 10; ++i)
    {
        line.samples.push_back ({double (i), ExtendedState (i, 0.5 * i, 0.0)});
    }
    CHECK (self_intersections (line).empty ());

    // A loop: (0,0) -> (2,0) -> (2,1) -> (1,1) -> (1,-1) crosses itself at (1,0).
    GeodesicTrajectory loop;
    const Position pts[] = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, -1}};
    for (int i = 0; i < 5; ++i)
    {
        loop.samples.push_back ({double (i), ExtendedState (pts[i], 0.0)});
    }
    const auto x = self_intersections (loop);
    REQUIRE (x.size () == 1);
    CHECK (x[0].position.c1 == doctest::Approx (1.0));
    CHECK (x[0].position.c2 == doctest::Approx (0.0));
    CHECK (x[0].t1 == doctest::Approx (0.5));
    CHECK (x[0].t2 == doctest::Approx (3.5));
}

TEST_CASE ("the cusped abnormal is simple while a hyperbolic neighbour loops")
{
    const auto p = make_historical ();
    const double g0 = -2 * pi / 3;
    const double horizon = 2 * std::sqrt (3.0);
    const auto abnormal = closed_form_trajectory_historical ({0.0, 2.0, g0}, horizon, 2000);
    CHECK (self_intersections (p, abnormal).empty ());

    const auto neighbour = closed_form_trajectory_historical ({0.0, 2.0, g0 + 0.05}, horizon, 2000);
    REQUIRE (classify (p, neighbour.front ().state).kind == ExtremalKind::Hyperbolic);
    const auto x = self_intersections (p, neighbour);
    REQUIRE (x.size () == 1);
    CHECK (x[0].t1 < x[0].t2);
    const auto a = oracle::historical_flow (0.0, 2.0, g0 + 0.05, x[0].t1, 1e-5);
    const auto b = oracle::historical_flow (0.0, 2.0, g0 + 0.05, x[0].t2, 1e-5);
    CHECK (dist ({a[0], a[1]}, {b[0], b[1]}) < 1e-9);
    CHECK (dist ({a[0], a[1]}, x[0].position) < 1e-9);
}

TEST_CASE ("discontinuity scan edge cases")
{
    const auto& table = weak_table ();
    const auto single = discontinuity_scan (table, {0.3, 0.4}, {0.3, 0.4}, 50);
    REQUIRE (single.samples.size () == 1);
    CHECK (single.jumps.empty ());
    CHECK_THROWS_AS ((void)discontinuity_scan (table, {0.3, 0.4}, {0.4, 0.4}, 0), Error);

    const auto smooth = discontinuity_scan (table, {0.3, 0.9}, {0.3, 0.1}, 60);
    REQUIRE (smooth.samples.size () == 60);
    CHECK (smooth.samples.front ().s == 0.0);
    CHECK (smooth.samples.back ().s == 1.0);
    CHECK (smooth.jumps.empty ());

    // Leaving the reachable region within t_max counts as a jump.
    ShootingConfig cfg;
    cfg.n_headings = 90;
    cfg.t_max = 0.5;
    cfg.time_step = 0.02;
    const ShootingTable shortrange (make_historical (), kWeak, cfg);
    const auto edge = discontinuity_scan (shortrange, {0.0, 0.5}, {0.0, 2.5}, 20);
    REQUIRE_FALSE (edge.jumps.empty ());
    const Jump& j = edge.jumps.front ();
    CHECK (j.left_limit.has_value ());
    CHECK_FALSE (j.right_value.has_value ());
}

TEST_CASE ("cut locus estimate")
{
    const auto p = make_historical ();
    ShootingConfig cfg;
    cfg.n_headings = 360;
    const CutLocusEstimate est = cut_locus_estimate (p, kStrong, 5.0, 64, cfg, 4);
    CHECK (est.horizon == doctest::Approx (1.5 * std::sqrt (3.0)));
    REQUIRE (est.arcs.size () == 2);
    const auto cusped = std::find_if (est.arcs.begin (), est.arcs.end (), [] (const AbnormalArc& a) { return a.cusp.has_value (); });
    REQUIRE (cusped != est.arcs.end ());
    CHECK (cusped->truncated_at_cusp);
    CHECK (cusped->samples.back ().t == doctest::Approx (std::sqrt (3.0)));
    CHECK (cusped->samples.back ().state.c1 == doctest::Approx (cusped->cusp->position.c1).epsilon (1e-10));
    CHECK (cusped->samples.back ().state.c2 == doctest::Approx (1.0).epsilon (1e-10));
    for (const auto& s : est.separating)
    {
        CHECK (s.t <= est.horizon + 1e-12);
    }

    const CutLocusEstimate short_est = cut_locus_estimate (p, kStrong, 1.0, 32, cfg, 2);
    CHECK (short_est.horizon == 1.0);
    for (const auto& arc : short_est.arcs)
    {
        CHECK_FALSE (arc.truncated_at_cusp);
        CHECK (arc.samples.back ().t == doctest::Approx (1.0));
    }

    try
    {
        (void)cut_locus_estimate (p, kWeak, 1.0, 32);
        FAIL ("expected Unsupported");
    }
    catch (const Error& e)
    {
        CHECK (e.code () == ErrorCode::Unsupported);
    }
}

TEST_CASE ("loop time")
{
    const auto p = make_historical ();
    CHECK (loop_time_estimate (p, kWeak, 1.0, 64, 0.05) == doctest::Approx (0.05));
    const auto t = loop_time_estimate (p, kStrong, 8.0, 256, 0.05);
    REQUIRE (t.has_value ());
    // The geodesic returning to q0 also reaches points just upstream of it.
    ShootingConfig cfg;
    cfg.t_max = 8.0;
    const ValueSample upstream = ShootingTable (p, kStrong, cfg).value ({-1e-3, 2.0});
    REQUIRE (upstream.reachable ());
    CHECK (std::abs (*t - *upstream.t_min) <= 0.05 + 1e-2);
    CHECK_THROWS_AS ((void)loop_time_estimate (p, kWeak, 1.0, 64, 0.0), Error);
}
