#include "manetsim/net_link.hpp"

#include <stdexcept>

namespace manet {

void validate(const LinkModel& link) {
    if (link.range <= 0.0) throw std::invalid_argument("link.range: must be > 0");
    if (link.hop_latency <= 0.0) throw std::invalid_argument("link.hop_latency: must be > 0");
}

Vec2 Network::position(NodeId node, SimTime t) const {
    return scenario_.tracks[static_cast<std::size_t>(node)].position_at(t, scenario_.bounds);
}

std::vector<NodeId> Network::neighbors(NodeId node, SimTime t) const {
    std::vector<NodeId> out;
    Vec2 p = position(node, t);
    double r2 = link_.range * link_.range;
    for (NodeId other = 0; other < n_nodes(); ++other) {
        if (other == node) continue;
        Vec2 q = position(other, t);
        double dx = p.x - q.x;
        double dy = p.y - q.y;
        if (dx * dx + dy * dy <= r2) out.push_back(other);
    }
    return out;
}

void Network::trace_transmit(const Packet& pkt, NodeId from) {
    TraceOp op = from == pkt.src ? TraceOp::Send : TraceOp::Forward;
    trace_.record(TraceRecord{engine_.now(), op, from, TraceLayer::RTR, pkt.ptype, pkt.uid,
                              pkt.size});
}

void Network::schedule_delivery(const Packet& pkt, NodeId from, NodeId to) {
    engine_.schedule(engine_.now() + link_.hop_latency, EventKind::PacketDelivery,
                     [this, pkt, from, to] { deliver_(to, pkt, from); });
}

int Network::broadcast(const Packet& pkt, NodeId from) {
    trace_transmit(pkt, from);
    std::vector<NodeId> nbrs = neighbors(from, engine_.now());
    for (NodeId to : nbrs) schedule_delivery(pkt, from, to);
    return static_cast<int>(nbrs.size());
}

bool Network::unicast(const Packet& pkt, NodeId from, NodeId to) {
    trace_transmit(pkt, from);
    Vec2 p = position(from, engine_.now());
    Vec2 q = position(to, engine_.now());
    double dx = p.x - q.x;
    double dy = p.y - q.y;
    if (dx * dx + dy * dy > link_.range * link_.range) return false;
    schedule_delivery(pkt, from, to);
    return true;
}

}  // namespace manet
