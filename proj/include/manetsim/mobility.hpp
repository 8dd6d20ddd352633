#ifndef MANETSIM_MOBILITY_HPP
#define MANETSIM_MOBILITY_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "manetsim/sim_core.hpp"

namespace manet {

using NodeId = std::int32_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct AreaBounds {
    double width = 0.0;
    double height = 0.0;
};

enum class MobilityModel { RandomWalk, RandomWaypoint };

struct MobilityParams {
    MobilityModel model = MobilityModel::RandomWaypoint;
    double speed_min = 0.0;   // m/s
    double speed_max = 10.0;  // m/s
    double pause_time = 0.0;  // s, Random Waypoint only
    double leg_duration = 10.0;  // s, Random Walk only
};

// One straight-line (or stationary) segment of a node's trajectory.
// Position at any t in [leg_start, leg_end] is leg_origin + velocity*(t -
// leg_start).
struct MobilityState {
    NodeId node = 0;
    Vec2 leg_origin;
    SimTime leg_start = 0.0;
    Vec2 velocity;
    SimTime leg_end = 0.0;
    bool paused = false;
};

struct OutOfLegError : std::runtime_error {
    explicit OutOfLegError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioFormatError : std::runtime_error {
    explicit ScenarioFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Throws std::invalid_argument with a field-level message on a bad combination
// (negative speeds, RandomWalk with nonzero pause, speed_max == 0, ...).
void validate(const MobilityParams& params);
void validate(const AreaBounds& bounds);

Vec2 position_at(const MobilityState& state, SimTime t);

// Folds a raw straight-line endpoint back into the area: each crossed border
// mirrors the position and negates that velocity component, repeated until
// the position is interior. Speed magnitude is preserved.
std::pair<Vec2, Vec2> reflect(Vec2 pos, Vec2 vel, const AreaBounds& bounds);

// Draws the next Random Walk leg (direction uniform on [0,2pi), then speed
// uniform on [speed_min, speed_max)) lasting leg_duration. A leg that hits
// the border is split at each bounce, so every returned segment is straight
// and stays inside the area.
std::vector<MobilityState> rw_next_leg(const MobilityState& prev, const MobilityParams& params,
                                       const AreaBounds& bounds, RandomStream& rng);

// Draws the next Random Waypoint leg: a pause of pause_time after each
// movement leg (when pause_time > 0), otherwise travel to a uniform random
// destination at a uniform speed (exact zero draws are re-drawn).
MobilityState rwp_next_leg(const MobilityState& prev, const MobilityParams& params,
                           const AreaBounds& bounds, RandomStream& rng);

// A node's full precomputed leg schedule covering [0, duration].
struct NodeTrack {
    NodeId node = 0;
    std::vector<MobilityState> legs;  // contiguous, sorted by leg_start

    // Position at t, clamped to the area (guards endpoint rounding).
    Vec2 position_at(SimTime t, const AreaBounds& bounds) const;
};

struct Scenario {
    AreaBounds bounds;
    double duration = 0.0;
    std::vector<NodeTrack> tracks;  // indexed by node id
};

// setdest-style generation: initial positions uniform over the area, then
// legs per the model until every node's schedule covers [0, duration].
Scenario generate_scenario(const MobilityParams& params, const AreaBounds& bounds, int n_nodes,
                           double duration, RandomStream& rng);

// A scenario with every node pinned at a fixed position for the whole run.
Scenario static_scenario(const std::vector<Vec2>& positions, const AreaBounds& bounds,
                         double duration);

// Line-oriented scenario file:
//   node <id> init <x> <y>
//   at <t> node <id> setdest <x> <y> <speed>
//   at <t> node <id> pause <duration>
// Floats carry 6 decimal digits; init lines sorted by node id, then event
// lines sorted by time then node id.
void write_scenario(const Scenario& scenario, std::ostream& out);
Scenario read_scenario(std::istream& in, const AreaBounds& bounds, double duration);

}  // namespace manet

#endif
