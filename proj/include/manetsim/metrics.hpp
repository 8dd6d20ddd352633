#ifndef MANETSIM_METRICS_HPP
#define MANETSIM_METRICS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "manetsim/trace.hpp"

namespace manet {

struct NoTrafficError : std::runtime_error {
    NoTrafficError() : std::runtime_error("no CBR data was originated") {}
};

struct RunMetrics {
    long long sent = 0;        // AGT s, CBR data
    long long received = 0;    // AGT r, CBR data
    long long routing_tx = 0;  // RTR s/f, control types, per hop
    double pdr = 0.0;
    std::optional<double> nro;  // undefined when nothing was delivered
    double throughput = 0.0;    // packets per second
};

// (AGT r for CBR) / (AGT s for CBR). Throws NoTrafficError on a zero
// denominator.
double compute_pdr(const TraceLog& trace);

// Routing-control transmissions (RTR s and f, each hop once) per delivered
// data packet; nullopt when nothing was delivered.
std::optional<double> compute_nro(const TraceLog& trace);

// (AGT r for CBR) / duration.
double compute_throughput(const TraceLog& trace, double duration);

RunMetrics compute_metrics(const TraceLog& trace, double duration);

struct Aggregate {
    int count = 0;
    double mean = 0.0;
    std::optional<double> stddev;  // sample (n-1); undefined for n < 2
    double min = 0.0;
    double max = 0.0;
};

// Throws std::invalid_argument on an empty input.
Aggregate aggregate(const std::vector<double>& values);

}  // namespace manet

#endif
