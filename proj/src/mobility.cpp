#include "manetsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace manet {

namespace {

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

Vec2 clamp_to_bounds(Vec2 p, const AreaBounds& b) {
    return Vec2{clampd(p.x, 0.0, b.width), clampd(p.y, 0.0, b.height)};
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void validate(const MobilityParams& params) {
    if (params.speed_min < 0.0) throw std::invalid_argument("speed_min: must be >= 0");
    if (params.speed_max < params.speed_min)
        throw std::invalid_argument("speed_max: must be >= speed_min");
    if (params.speed_max <= 0.0) throw std::invalid_argument("speed_max: must be > 0");
    if (params.pause_time < 0.0) throw std::invalid_argument("pause_time: must be >= 0");
    if (params.model == MobilityModel::RandomWalk) {
        if (params.pause_time != 0.0)
            throw std::invalid_argument("pause_time: RandomWalk has no pause, must be 0");
        if (params.leg_duration <= 0.0)
            throw std::invalid_argument("leg_duration: must be > 0");
    }
}

void validate(const AreaBounds& bounds) {
    if (bounds.width <= 0.0) throw std::invalid_argument("area.width: must be > 0");
    if (bounds.height <= 0.0) throw std::invalid_argument("area.height: must be > 0");
}

Vec2 position_at(const MobilityState& state, SimTime t) {
    if (t < state.leg_start || t > state.leg_end) {
        throw OutOfLegError("t=" + std::to_string(t) + " outside leg [" +
                            std::to_string(state.leg_start) + ", " +
                            std::to_string(state.leg_end) + "]");
    }
    double dt = t - state.leg_start;
    return Vec2{state.leg_origin.x + state.velocity.x * dt,
                state.leg_origin.y + state.velocity.y * dt};
}

std::pair<Vec2, Vec2> reflect(Vec2 pos, Vec2 vel, const AreaBounds& bounds) {
    int guard = 0;
    while ((pos.x < 0.0 || pos.x > bounds.width || pos.y < 0.0 || pos.y > bounds.height) &&
           ++guard < 1000) {
        if (pos.x < 0.0) {
            pos.x = -pos.x;
            vel.x = -vel.x;
        } else if (pos.x > bounds.width) {
            pos.x = 2.0 * bounds.width - pos.x;
            vel.x = -vel.x;
        }
        if (pos.y < 0.0) {
            pos.y = -pos.y;
            vel.y = -vel.y;
        } else if (pos.y > bounds.height) {
            pos.y = 2.0 * bounds.height - pos.y;
            vel.y = -vel.y;
        }
    }
    return {pos, vel};
}

std::vector<MobilityState> rw_next_leg(const MobilityState& prev, const MobilityParams& params,
                                       const AreaBounds& bounds, RandomStream& rng) {
    double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double speed = rng.uniform(params.speed_min, params.speed_max);
    while (speed == 0.0 && params.speed_max > 0.0)
        speed = rng.uniform(params.speed_min, params.speed_max);

    Vec2 vel{speed * std::cos(theta), speed * std::sin(theta)};
    Vec2 pos = clamp_to_bounds(position_at(prev, prev.leg_end), bounds);
    SimTime t = prev.leg_end;
    double remaining = params.leg_duration;

    std::vector<MobilityState> out;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (int guard = 0; guard < 10000; ++guard) {
        double tx = kInf;
        if (vel.x > 0.0) tx = (bounds.width - pos.x) / vel.x;
        else if (vel.x < 0.0) tx = (0.0 - pos.x) / vel.x;
        double ty = kInf;
        if (vel.y > 0.0) ty = (bounds.height - pos.y) / vel.y;
        else if (vel.y < 0.0) ty = (0.0 - pos.y) / vel.y;

        // On a wall still heading out (endpoint rounding): bounce in place.
        if (tx <= 0.0 || ty <= 0.0) {
            if (tx <= 0.0) vel.x = -vel.x;
            if (ty <= 0.0) vel.y = -vel.y;
            continue;
        }

        double t_hit = std::min(tx, ty);
        if (t_hit >= remaining) {
            out.push_back(MobilityState{prev.node, pos, t, vel, t + remaining, false});
            break;
        }
        Vec2 wall{pos.x + vel.x * t_hit, pos.y + vel.y * t_hit};
        wall = clamp_to_bounds(wall, bounds);
        out.push_back(MobilityState{prev.node, pos, t, vel, t + t_hit, false});
        if (tx <= ty) vel.x = -vel.x;
        if (ty <= tx) vel.y = -vel.y;
        pos = wall;
        t += t_hit;
        remaining -= t_hit;
    }
    if (out.empty()) throw std::logic_error("rw_next_leg: bounce loop did not terminate");
    return out;
}

MobilityState rwp_next_leg(const MobilityState& prev, const MobilityParams& params,
                           const AreaBounds& bounds, RandomStream& rng) {
    SimTime t = prev.leg_end;
    Vec2 pos = clamp_to_bounds(position_at(prev, prev.leg_end), bounds);

    if (!prev.paused && params.pause_time > 0.0) {
        return MobilityState{prev.node, pos, t, Vec2{0.0, 0.0}, t + params.pause_time, true};
    }

    Vec2 dest;
    double dist = 0.0;
    do {
        dest = Vec2{rng.uniform(0.0, bounds.width), rng.uniform(0.0, bounds.height)};
        dist = std::hypot(dest.x - pos.x, dest.y - pos.y);
    } while (dist == 0.0);

    double speed = rng.uniform(params.speed_min, params.speed_max);
    while (speed == 0.0) speed = rng.uniform(params.speed_min, params.speed_max);

    double dur = dist / speed;
    Vec2 vel{(dest.x - pos.x) / dur, (dest.y - pos.y) / dur};
    return MobilityState{prev.node, pos, t, vel, t + dur, false};
}

Vec2 NodeTrack::position_at(SimTime t, const AreaBounds& bounds) const {
    if (legs.empty()) throw OutOfLegError("empty track");
    auto it = std::upper_bound(legs.begin(), legs.end(), t,
                               [](SimTime v, const MobilityState& leg) { return v < leg.leg_start; });
    if (it == legs.begin()) throw OutOfLegError("t before first leg");
    const MobilityState& leg = *(it - 1);
    // Clamp into the leg interval: scenario files round times to 6 digits,
    // which can leave hairline gaps between consecutive legs.
    double tc = clampd(t, leg.leg_start, leg.leg_end);
    return clamp_to_bounds(manet::position_at(leg, tc), bounds);
}

Scenario generate_scenario(const MobilityParams& params, const AreaBounds& bounds, int n_nodes,
                           double duration, RandomStream& rng) {
    validate(params);
    validate(bounds);
    if (n_nodes < 1) throw std::invalid_argument("n_nodes: must be >= 1");
    if (duration <= 0.0) throw std::invalid_argument("duration: must be > 0");

    Scenario scenario;
    scenario.bounds = bounds;
    scenario.duration = duration;
    scenario.tracks.reserve(static_cast<std::size_t>(n_nodes));

    for (NodeId node = 0; node < n_nodes; ++node) {
        Vec2 init{rng.uniform(0.0, bounds.width), rng.uniform(0.0, bounds.height)};
        NodeTrack track;
        track.node = node;
        // Synthetic zero-length arrival so the first real leg starts at t=0;
        // paused=false makes Random Waypoint begin with its initial pause.
        MobilityState prev{node, init, 0.0, Vec2{0.0, 0.0}, 0.0, false};
        SimTime covered = 0.0;
        while (covered < duration) {
            if (params.model == MobilityModel::RandomWalk) {
                std::vector<MobilityState> legs = rw_next_leg(prev, params, bounds, rng);
                for (const MobilityState& leg : legs) track.legs.push_back(leg);
                prev = track.legs.back();
            } else {
                MobilityState leg = rwp_next_leg(prev, params, bounds, rng);
                track.legs.push_back(leg);
                prev = leg;
            }
            covered = prev.leg_end;
        }
        scenario.tracks.push_back(std::move(track));
    }
    return scenario;
}

Scenario static_scenario(const std::vector<Vec2>& positions, const AreaBounds& bounds,
                         double duration) {
    validate(bounds);
    if (duration <= 0.0) throw std::invalid_argument("duration: must be > 0");
    Scenario scenario;
    scenario.bounds = bounds;
    scenario.duration = duration;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        NodeTrack track;
        track.node = static_cast<NodeId>(i);
        track.legs.push_back(MobilityState{track.node, clamp_to_bounds(positions[i], bounds), 0.0,
                                           Vec2{0.0, 0.0}, duration, true});
        scenario.tracks.push_back(std::move(track));
    }
    return scenario;
}

void write_scenario(const Scenario& scenario, std::ostream& out) {
    for (const NodeTrack& track : scenario.tracks) {
        if (track.legs.empty()) continue;
        const Vec2& init = track.legs.front().leg_origin;
        out << "node " << track.node << " init " << fmt6(init.x) << " " << fmt6(init.y) << "\n";
    }
    struct Line {
        SimTime t;
        NodeId node;
        std::string text;
    };
    std::vector<Line> lines;
    for (const NodeTrack& track : scenario.tracks) {
        for (const MobilityState& leg : track.legs) {
            std::ostringstream os;
            if (leg.paused) {
                os << "at " << fmt6(leg.leg_start) << " node " << leg.node << " pause "
                   << fmt6(leg.leg_end - leg.leg_start);
            } else {
                Vec2 end = position_at(leg, leg.leg_end);
                double speed = std::hypot(leg.velocity.x, leg.velocity.y);
                os << "at " << fmt6(leg.leg_start) << " node " << leg.node << " setdest "
                   << fmt6(end.x) << " " << fmt6(end.y) << " " << fmt6(speed);
            }
            lines.push_back(Line{leg.leg_start, leg.node, os.str()});
        }
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.node < b.node;
    });
    for (const Line& line : lines) out << line.text << "\n";
}

Scenario read_scenario(std::istream& in, const AreaBounds& bounds, double duration) {
    validate(bounds);
    std::map<NodeId, Vec2> inits;
    struct Ev {
        SimTime t;
        bool pause;
        Vec2 dest;      // setdest
        double speed;   // setdest
        double length;  // pause
    };
    std::map<NodeId, std::vector<Ev>> events;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string word;
        is >> word;
        auto fail = [&](const std::string& why) {
            throw ScenarioFormatError("line " + std::to_string(lineno) + ": " + why);
        };
        if (word == "node") {
            NodeId node;
            std::string kw;
            Vec2 p;
            if (!(is >> node >> kw >> p.x >> p.y) || kw != "init") fail("bad init line");
            inits[node] = p;
        } else if (word == "at") {
            SimTime t;
            std::string kw1, kw2;
            NodeId node;
            if (!(is >> t >> kw1 >> node >> kw2) || kw1 != "node") fail("bad event line");
            Ev ev{};
            ev.t = t;
            if (kw2 == "setdest") {
                if (!(is >> ev.dest.x >> ev.dest.y >> ev.speed)) fail("bad setdest line");
                if (ev.speed <= 0.0) fail("setdest speed must be > 0");
                ev.pause = false;
            } else if (kw2 == "pause") {
                if (!(is >> ev.length)) fail("bad pause line");
                if (ev.length < 0.0) fail("pause duration must be >= 0");
                ev.pause = true;
            } else {
                fail("unknown event '" + kw2 + "'");
            }
            events[node].push_back(ev);
        } else {
            fail("unknown directive '" + word + "'");
        }
    }

    Scenario scenario;
    scenario.bounds = bounds;
    scenario.duration = duration;
    if (inits.empty()) throw ScenarioFormatError("no init lines");
    for (const auto& [node, evs] : events) {
        if (!inits.count(node)) {
            throw ScenarioFormatError("events for node " + std::to_string(node) +
                                      " without an init line");
        }
    }
    NodeId max_node = inits.rbegin()->first;
    scenario.tracks.resize(static_cast<std::size_t>(max_node) + 1);
    for (auto& [node, init] : inits) {
        NodeTrack& track = scenario.tracks[static_cast<std::size_t>(node)];
        track.node = node;
        Vec2 pos = Vec2{clampd(init.x, 0.0, bounds.width), clampd(init.y, 0.0, bounds.height)};
        SimTime t = 0.0;
        auto evs = events[node];
        std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
        for (const Ev& ev : evs) {
            if (ev.t < t - 1e-3) throw ScenarioFormatError("overlapping legs for node");
            if (ev.pause) {
                track.legs.push_back(
                    MobilityState{node, pos, ev.t, Vec2{0.0, 0.0}, ev.t + ev.length, true});
                t = ev.t + ev.length;
            } else {
                Vec2 dest{clampd(ev.dest.x, 0.0, bounds.width), clampd(ev.dest.y, 0.0, bounds.height)};
                double dist = std::hypot(dest.x - pos.x, dest.y - pos.y);
                double dur = dist / ev.speed;
                Vec2 vel = dur > 0.0 ? Vec2{(dest.x - pos.x) / dur, (dest.y - pos.y) / dur}
                                     : Vec2{0.0, 0.0};
                track.legs.push_back(MobilityState{node, pos, ev.t, vel, ev.t + dur, false});
                pos = dest;
                t = ev.t + dur;
            }
        }
        if (track.legs.empty() || track.legs.back().leg_end < duration) {
            // Stationary tail: nodes with no events, or rounding slivers.
            track.legs.push_back(MobilityState{node, pos, t, Vec2{0.0, 0.0}, duration, true});
        }
    }
    for (const NodeTrack& track : scenario.tracks) {
        if (track.legs.empty()) throw ScenarioFormatError("node without init line");
    }
    return scenario;
}

}  // namespace manet
