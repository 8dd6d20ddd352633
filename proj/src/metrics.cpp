#include "manetsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace manet {

namespace {

struct Counters {
    long long sent = 0;
    long long received = 0;
    long long routing_tx = 0;
};

Counters count(const TraceLog& trace) {
    Counters c;
    for (const TraceRecord& rec : trace.records()) {
        if (rec.layer == TraceLayer::AGT && rec.ptype == PacketType::CbrData) {
            if (rec.op == TraceOp::Send) ++c.sent;
            else if (rec.op == TraceOp::Receive) ++c.received;
        } else if (rec.layer == TraceLayer::RTR && is_control(rec.ptype) &&
                   (rec.op == TraceOp::Send || rec.op == TraceOp::Forward)) {
            ++c.routing_tx;
        }
    }
    return c;
}

}  // namespace

double compute_pdr(const TraceLog& trace) {
    Counters c = count(trace);
    if (c.sent == 0) throw NoTrafficError();
    return static_cast<double>(c.received) / static_cast<double>(c.sent);
}

std::optional<double> compute_nro(const TraceLog& trace) {
    Counters c = count(trace);
    if (c.received == 0) return std::nullopt;
    return static_cast<double>(c.routing_tx) / static_cast<double>(c.received);
}

double compute_throughput(const TraceLog& trace, double duration) {
    if (duration <= 0.0) throw std::invalid_argument("duration: must be > 0");
    Counters c = count(trace);
    return static_cast<double>(c.received) / duration;
}

RunMetrics compute_metrics(const TraceLog& trace, double duration) {
    if (duration <= 0.0) throw std::invalid_argument("duration: must be > 0");
    Counters c = count(trace);
    if (c.sent == 0) throw NoTrafficError();
    RunMetrics m;
    m.sent = c.sent;
    m.received = c.received;
    m.routing_tx = c.routing_tx;
    m.pdr = static_cast<double>(c.received) / static_cast<double>(c.sent);
    if (c.received > 0)
        m.nro = static_cast<double>(c.routing_tx) / static_cast<double>(c.received);
    m.throughput = static_cast<double>(c.received) / duration;
    return m;
}

Aggregate aggregate(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("aggregate: empty input");
    Aggregate a;
    a.count = static_cast<int>(values.size());
    double sum = 0.0;
    a.min = values.front();
    a.max = values.front();
    for (double v : values) {
        sum += v;
        a.min = std::min(a.min, v);
        a.max = std::max(a.max, v);
    }
    a.mean = sum / static_cast<double>(a.count);
    if (a.count >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.stddev = std::sqrt(ss / static_cast<double>(a.count - 1));
    }
    return a;
}

}  // namespace manet
