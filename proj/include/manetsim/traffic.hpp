#ifndef MANETSIM_TRAFFIC_HPP
#define MANETSIM_TRAFFIC_HPP

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "manetsim/mobility.hpp"
#include "manetsim/sim_core.hpp"

namespace manet {

inline constexpr int kCbrPacketBytes = 512;
inline constexpr double kCbrRatePps = 1.0;
inline constexpr double kCbrStartWindow = 10.0;  // starts staggered over [0, 10] s

struct CbrConnection {
    NodeId src = 0;
    NodeId dst = 0;
    SimTime start = 0.0;
    double rate = kCbrRatePps;  // packets per second
    int size = kCbrPacketBytes;
};

struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// cbrgen-style pattern: round(conn_fraction * n_nodes) ordered (src, dst)
// pairs, src != dst, no duplicates, start times uniform over [0, 10] s.
std::vector<CbrConnection> generate_connections(int n_nodes, double conn_fraction,
                                                RandomStream& rng);

// Line format: `cbr <src> <dst> <start> <rate_pps> <size_bytes>`.
void write_connections(const std::vector<CbrConnection>& conns, std::ostream& out);
std::vector<CbrConnection> read_connections(std::istream& in);

// Tick times for one connection: start, start + 1/rate, ... strictly below
// duration.
std::vector<SimTime> cbr_tick_times(const CbrConnection& conn, double duration);

}  // namespace manet

#endif
