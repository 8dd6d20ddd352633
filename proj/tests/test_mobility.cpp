#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "manetsim/mobility.hpp"

using namespace manet;

namespace {

const AreaBounds kArea{670.0, 670.0};

MobilityState initial_state(Vec2 pos) {
    MobilityState s;
    s.node = 0;
    s.leg_origin = pos;
    s.leg_start = 0.0;
    s.leg_end = 0.0;
    s.velocity = Vec2{0.0, 0.0};
    s.paused = false;
    return s;
}

bool inside(Vec2 p, const AreaBounds& b) {
    return p.x >= 0.0 && p.x <= b.width && p.y >= 0.0 && p.y <= b.height;
}

// Raw legs are allowed rounding-level excursions at bounce points; only the
// clamped track accessor promises exact containment.
bool inside_eps(Vec2 p, const AreaBounds& b) {
    const double eps = 1e-9;
    return p.x >= -eps && p.x <= b.width + eps && p.y >= -eps && p.y <= b.height + eps;
}

}  // namespace

TEST_CASE("parameter validation names the failing field") {
    MobilityParams p;
    p.model = MobilityModel::RandomWalk;
    p.pause_time = 5.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);

    p = MobilityParams{};
    p.speed_max = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);

    p = MobilityParams{};
    p.speed_min = -1.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);

    p = MobilityParams{};
    p.speed_min = 20.0;
    p.speed_max = 10.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);

    CHECK_THROWS_AS(validate(AreaBounds{0.0, 670.0}), std::invalid_argument);
}

TEST_CASE("position_at interpolates linearly inside the leg") {
    MobilityState s;
    s.leg_origin = Vec2{100.0, 200.0};
    s.leg_start = 10.0;
    s.leg_end = 20.0;
    s.velocity = Vec2{2.0, -1.0};
    Vec2 p = position_at(s, 15.0);
    CHECK(p.x == doctest::Approx(110.0));
    CHECK(p.y == doctest::Approx(195.0));
    CHECK_THROWS_AS(position_at(s, 9.0), OutOfLegError);
    CHECK_THROWS_AS(position_at(s, 21.0), OutOfLegError);
}

// First Random Walk draw with seed 42: theta = u1*2pi, speed = u2*speed_max,
// frozen from the splitmix64 reference sequence.
TEST_CASE("random walk first leg reproduces the frozen draw") {
    MobilityParams p;
    p.model = MobilityModel::RandomWalk;
    p.speed_min = 0.0;
    p.speed_max = 10.0;
    p.leg_duration = 10.0;
    RandomStream rng(42);

    auto legs = rw_next_leg(initial_state(Vec2{335.0, 335.0}), p, kArea, rng);
    REQUIRE(!legs.empty());
    const MobilityState& leg = legs.front();
    CHECK(leg.velocity.x == doctest::Approx(-0.084711924913570116).epsilon(1e-12));
    CHECK(leg.velocity.y == doctest::Approx(-1.5968585612954365).epsilon(1e-12));
    double speed = std::hypot(leg.velocity.x, leg.velocity.y);
    CHECK(speed == doctest::Approx(1.599103928769201).epsilon(1e-12));
}

TEST_CASE("random walk legs cover exactly leg_duration and stay joined") {
    MobilityParams p;
    p.model = MobilityModel::RandomWalk;
    p.speed_max = 50.0;
    p.leg_duration = 10.0;
    RandomStream rng(7);

    MobilityState prev = initial_state(Vec2{10.0, 10.0});
    for (int i = 0; i < 200; ++i) {
        auto legs = rw_next_leg(prev, p, kArea, rng);
        REQUIRE(!legs.empty());
        CHECK(legs.front().leg_start == doctest::Approx(prev.leg_end));
        CHECK(legs.back().leg_end ==
              doctest::Approx(legs.front().leg_start + p.leg_duration));
        for (std::size_t k = 0; k < legs.size(); ++k) {
            const auto& leg = legs[k];
            CHECK(inside(position_at(leg, leg.leg_start), kArea));
            CHECK(inside_eps(position_at(leg, leg.leg_end), kArea));
            if (k > 0) {
                Vec2 a = position_at(legs[k - 1], legs[k - 1].leg_end);
                Vec2 b = position_at(leg, leg.leg_start);
                CHECK(a.x == doctest::Approx(b.x));
                CHECK(a.y == doctest::Approx(b.y));
                // A bounce flips a component but keeps the speed.
                double s0 = std::hypot(legs[k - 1].velocity.x, legs[k - 1].velocity.y);
                double s1 = std::hypot(leg.velocity.x, leg.velocity.y);
                CHECK(s0 == doctest::Approx(s1));
            }
        }
        prev = legs.back();
    }
}

TEST_CASE("reflection folds positions back and preserves speed") {
    auto [p1, v1] = reflect(Vec2{-10.0, 300.0}, Vec2{-3.0, 1.0}, kArea);
    CHECK(p1.x == doctest::Approx(10.0));
    CHECK(p1.y == doctest::Approx(300.0));
    CHECK(v1.x == doctest::Approx(3.0));
    CHECK(v1.y == doctest::Approx(1.0));

    auto [p2, v2] = reflect(Vec2{700.0, -30.0}, Vec2{2.0, -5.0}, kArea);
    CHECK(p2.x == doctest::Approx(640.0));
    CHECK(p2.y == doctest::Approx(30.0));
    CHECK(v2.x == doctest::Approx(-2.0));
    CHECK(v2.y == doctest::Approx(5.0));

    // Interior points are untouched.
    auto [p3, v3] = reflect(Vec2{5.0, 5.0}, Vec2{1.0, 1.0}, kArea);
    CHECK(p3.x == 5.0);
    CHECK(p3.y == 5.0);
    CHECK(v3.x == 1.0);
    CHECK(v3.y == 1.0);
}

TEST_CASE("waypoint model pauses after each movement leg") {
    MobilityParams p;
    p.model = MobilityModel::RandomWaypoint;
    p.speed_max = 20.0;
    p.pause_time = 25.0;
    RandomStream rng(11);

    // With a nonzero pause the schedule starts paused.
    MobilityState first = rwp_next_leg(initial_state(Vec2{100.0, 100.0}), p, kArea, rng);
    CHECK(first.paused);
    CHECK(first.leg_end - first.leg_start == doctest::Approx(25.0));
    CHECK(first.velocity.x == 0.0);
    CHECK(first.velocity.y == 0.0);

    MobilityState move = rwp_next_leg(first, p, kArea, rng);
    CHECK_FALSE(move.paused);
    double speed = std::hypot(move.velocity.x, move.velocity.y);
    CHECK(speed > 0.0);
    CHECK(speed <= 20.0);
    CHECK(inside(position_at(move, move.leg_end), kArea));

    MobilityState again = rwp_next_leg(move, p, kArea, rng);
    CHECK(again.paused);
}

TEST_CASE("waypoint model with zero pause never pauses") {
    MobilityParams p;
    p.model = MobilityModel::RandomWaypoint;
    p.speed_max = 20.0;
    p.pause_time = 0.0;
    RandomStream rng(13);

    MobilityState prev = initial_state(Vec2{300.0, 300.0});
    for (int i = 0; i < 100; ++i) {
        MobilityState leg = rwp_next_leg(prev, p, kArea, rng);
        CHECK_FALSE(leg.paused);
        CHECK(std::hypot(leg.velocity.x, leg.velocity.y) > 0.0);
        prev = leg;
    }
}

TEST_CASE("generated scenarios cover the duration and stay inside the area") {
    for (MobilityModel model : {MobilityModel::RandomWalk, MobilityModel::RandomWaypoint}) {
        MobilityParams p;
        p.model = model;
        p.speed_max = 50.0;
        p.pause_time = model == MobilityModel::RandomWaypoint ? 25.0 : 0.0;
        RandomStream rng(1729);
        Scenario scen = generate_scenario(p, kArea, 20, 200.0, rng);
        REQUIRE(scen.tracks.size() == 20);
        for (const NodeTrack& track : scen.tracks) {
            REQUIRE(!track.legs.empty());
            CHECK(track.legs.front().leg_start == 0.0);
            CHECK(track.legs.back().leg_end >= 200.0);
            for (double t = 0.0; t <= 200.0; t += 0.37) {
                CHECK(inside(track.position_at(t, kArea), kArea));
            }
        }
    }
}

TEST_CASE("scenario files round-trip") {
    MobilityParams p;
    p.model = MobilityModel::RandomWaypoint;
    p.speed_max = 50.0;
    p.pause_time = 25.0;
    RandomStream rng(314);
    Scenario scen = generate_scenario(p, kArea, 10, 200.0, rng);

    std::stringstream buf;
    write_scenario(scen, buf);
    Scenario back = read_scenario(buf, kArea, 200.0);
    REQUIRE(back.tracks.size() == scen.tracks.size());

    // Positions agree to the file's 6-decimal precision everywhere.
    for (std::size_t n = 0; n < scen.tracks.size(); ++n) {
        for (double t = 0.0; t <= 200.0; t += 1.7) {
            Vec2 a = scen.tracks[n].position_at(t, kArea);
            Vec2 b = back.tracks[n].position_at(t, kArea);
            CHECK(std::abs(a.x - b.x) < 1e-3);
            CHECK(std::abs(a.y - b.y) < 1e-3);
        }
    }

    std::stringstream bad("node 0 init 5 5\nat 1.0 node 7 setdest 1 2 0.5\n");
    CHECK_THROWS_AS(read_scenario(bad, kArea, 200.0), ScenarioFormatError);
}

TEST_CASE("static scenarios pin nodes in place") {
    Scenario scen = static_scenario({Vec2{0.0, 0.0}, Vec2{200.0, 0.0}, Vec2{400.0, 0.0}},
                                    AreaBounds{670.0, 670.0}, 200.0);
    REQUIRE(scen.tracks.size() == 3);
    Vec2 p = scen.tracks[1].position_at(123.4, scen.bounds);
    CHECK(p.x == 200.0);
    CHECK(p.y == 0.0);
}
