#ifndef MANETSIM_NET_LINK_HPP
#define MANETSIM_NET_LINK_HPP

#include <functional>
#include <vector>

#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/sim_core.hpp"
#include "manetsim/trace.hpp"

namespace manet {

struct LinkModel {
    double range = 250.0;        // meters
    double hop_latency = 0.002;  // seconds per hop
    bool bandwidth_unlimited = true;  // fixed in v1
};

void validate(const LinkModel& link);

// Unit-disk broadcast medium over scenario positions: ideal MAC, fixed
// per-hop latency, connectivity evaluated at send time. Every transmission
// is traced once at the RTR layer (Send when the transmitting node is the
// packet's src, Forward otherwise), whether or not anyone is in range.
class Network {
  public:
    using DeliveryHandler = std::function<void(NodeId to, const Packet& pkt, NodeId from)>;

    Network(Engine& engine, const Scenario& scenario, LinkModel link, TraceLog& trace)
        : engine_(engine), scenario_(scenario), link_(link), trace_(trace) {}

    void set_delivery_handler(DeliveryHandler handler) { deliver_ = std::move(handler); }

    const LinkModel& link() const { return link_; }
    int n_nodes() const { return static_cast<int>(scenario_.tracks.size()); }

    Vec2 position(NodeId node, SimTime t) const;

    // All other nodes within `range` of `node` at time t (closed disk),
    // ascending id.
    std::vector<NodeId> neighbors(NodeId node, SimTime t) const;

    // One delivery event at now + hop_latency per current neighbor.
    // Returns the number of deliveries scheduled.
    int broadcast(const Packet& pkt, NodeId from);

    // Unicast one hop to `to` (usually the route's next hop, not pkt.dst).
    // True if `to` was in range and a delivery event was scheduled; false is
    // the send-failure signal to the caller's routing agent.
    bool unicast(const Packet& pkt, NodeId from, NodeId to);

  private:
    void trace_transmit(const Packet& pkt, NodeId from);
    void schedule_delivery(const Packet& pkt, NodeId from, NodeId to);

    Engine& engine_;
    const Scenario& scenario_;
    LinkModel link_;
    TraceLog& trace_;
    DeliveryHandler deliver_;
};

}  // namespace manet

#endif
