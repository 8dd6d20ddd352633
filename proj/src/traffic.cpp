#include "manetsim/traffic.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace manet {

std::vector<CbrConnection> generate_connections(int n_nodes, double conn_fraction,
                                                RandomStream& rng) {
    if (n_nodes < 1) throw std::invalid_argument("n_nodes: must be >= 1");
    if (conn_fraction < 0.0) throw std::invalid_argument("conn_fraction: must be non-negative");

    long long want = std::llround(conn_fraction * n_nodes);
    long long distinct = static_cast<long long>(n_nodes) * (n_nodes - 1);
    if (want > distinct)
        throw InfeasibleError("cannot form " + std::to_string(want) +
                              " distinct connections from " + std::to_string(n_nodes) + " nodes");

    std::vector<CbrConnection> conns;
    std::set<std::pair<NodeId, NodeId>> used;
    while (static_cast<long long>(conns.size()) < want) {
        NodeId src = rng.uniform_int(n_nodes);
        NodeId dst = rng.uniform_int(n_nodes);
        if (src == dst) continue;
        if (!used.insert({src, dst}).second) continue;
        CbrConnection conn;
        conn.src = src;
        conn.dst = dst;
        conn.start = rng.uniform(0.0, kCbrStartWindow);
        conns.push_back(conn);
    }
    return conns;
}

void write_connections(const std::vector<CbrConnection>& conns, std::ostream& out) {
    char buf[128];
    for (const CbrConnection& c : conns) {
        std::snprintf(buf, sizeof buf, "cbr %d %d %.6f %.6f %d\n", c.src, c.dst, c.start, c.rate,
                      c.size);
        out << buf;
    }
}

std::vector<CbrConnection> read_connections(std::istream& in) {
    std::vector<CbrConnection> conns;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string kw;
        CbrConnection c;
        if (!(is >> kw >> c.src >> c.dst >> c.start >> c.rate >> c.size) || kw != "cbr")
            throw std::runtime_error("connection file line " + std::to_string(lineno) +
                                     ": bad format");
        if (c.src == c.dst || c.start < 0.0 || c.rate <= 0.0 || c.size <= 0)
            throw std::runtime_error("connection file line " + std::to_string(lineno) +
                                     ": invalid values");
        conns.push_back(c);
    }
    return conns;
}

std::vector<SimTime> cbr_tick_times(const CbrConnection& conn, double duration) {
    std::vector<SimTime> ticks;
    double interval = 1.0 / conn.rate;
    for (long long k = 0;; ++k) {
        SimTime t = conn.start + static_cast<double>(k) * interval;
        if (t >= duration) break;
        ticks.push_back(t);
    }
    return ticks;
}

}  // namespace manet
