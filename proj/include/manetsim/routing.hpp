#ifndef MANETSIM_ROUTING_HPP
#define MANETSIM_ROUTING_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "manetsim/net_link.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/sim_core.hpp"
#include "manetsim/trace.hpp"

namespace manet {

// Per-run services shared by every agent; owned by the run context.
struct SimServices {
    Engine* engine = nullptr;
    Network* net = nullptr;
    TraceLog* trace = nullptr;
    RandomStream* jitter = nullptr;
    double duration = 0.0;
    std::uint64_t next_uid = 1;

    SimTime now() const { return engine->now(); }
    std::uint64_t fresh_uid() { return next_uid++; }
};

inline constexpr int kDataTtl = 64;

class RoutingAgent {
  public:
    RoutingAgent(NodeId self, SimServices& env) : self_(self), env_(env) {}
    virtual ~RoutingAgent() = default;
    RoutingAgent(const RoutingAgent&) = delete;
    RoutingAgent& operator=(const RoutingAgent&) = delete;

    virtual void start() = 0;
    // A locally originated data packet (AGT send is already traced).
    virtual void originate(const Packet& data) = 0;
    // Link-layer delivery.
    virtual void receive(const Packet& pkt, NodeId from) = 0;

    NodeId id() const { return self_; }

  protected:
    void deliver_local(const Packet& pkt) {
        env_.trace->record(TraceRecord{env_.now(), TraceOp::Receive, self_, TraceLayer::AGT,
                                       pkt.ptype, pkt.uid, pkt.size});
    }
    void drop(const Packet& pkt) {
        env_.trace->record(TraceRecord{env_.now(), TraceOp::Drop, self_, TraceLayer::RTR,
                                       pkt.ptype, pkt.uid, pkt.size});
    }

    NodeId self_;
    SimServices& env_;
};

// Drop-oldest FIFO used by the reactive protocols while a route is being
// discovered: 64 packets per node, 30 s residence limit.
class SendBuffer {
  public:
    static constexpr std::size_t kCapacity = 64;
    static constexpr double kTimeout = 30.0;

    // Packets evicted to make room (at most one) are returned for tracing.
    std::vector<Packet> push(const Packet& pkt, SimTime now);
    // Removes and returns all buffered packets addressed to dst.
    std::vector<Packet> take_for(NodeId dst);
    // Removes and returns packets that exceeded the residence limit.
    std::vector<Packet> expire(SimTime now);
    bool has_packets_for(NodeId dst) const;
    std::size_t size() const { return items_.size(); }

  private:
    struct Item {
        Packet pkt;
        SimTime enqueued;
    };
    std::deque<Item> items_;
};

}  // namespace manet

#endif
