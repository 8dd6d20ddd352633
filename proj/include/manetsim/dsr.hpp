#ifndef MANETSIM_DSR_HPP
#define MANETSIM_DSR_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manetsim/routing.hpp"

namespace manet {

// Full node sequence, origin first, destination last.
struct DsrRreqPayload : PacketPayload {
    NodeId origin;
    std::uint32_t request_id;
    NodeId target;
    std::vector<NodeId> record;  // nodes traversed so far, origin included
};

struct DsrRrepPayload : PacketPayload {
    std::vector<NodeId> route;  // origin..target
};

struct DsrRerrPayload : PacketPayload {
    NodeId broken_from;
    NodeId broken_to;
    std::vector<NodeId> back_route;  // detector..origin
};

struct DsrSourceRoute : PacketPayload {
    std::vector<NodeId> route;  // carried by data packets
};

struct DsrCachedRoute {
    std::vector<NodeId> hops;
    SimTime learned;
};

class DsrRouteCache {
  public:
    static constexpr std::size_t kMaxPerDest = 4;
    static constexpr double kExpiry = 300.0;

    void insert(const std::vector<NodeId>& route, SimTime now);
    // Best usable route from self to dst: fewest hops, ties by most recent.
    std::optional<std::vector<NodeId>> lookup(NodeId self, NodeId dst, SimTime now) const;
    // Drops every route using the link, in either direction.
    void purge_link(NodeId a, NodeId b);
    std::size_t route_count() const;
    const std::vector<DsrCachedRoute>* routes_to(NodeId dst) const;

  private:
    std::map<NodeId, std::vector<DsrCachedRoute>> by_dest_;
};

class DsrAgent : public RoutingAgent {
  public:
    static constexpr double kFirstBackoff = 0.5;
    static constexpr double kMaxBackoff = 10.0;
    static constexpr int kMaxTries = 16;
    static constexpr int kCtrlBaseBytes = 16;
    static constexpr int kCtrlPerHopBytes = 4;

    DsrAgent(NodeId self, SimServices& env) : RoutingAgent(self, env) {}

    void start() override {}
    void originate(const Packet& data) override;
    void receive(const Packet& pkt, NodeId from) override;

    const DsrRouteCache& cache() const { return cache_; }
    std::size_t buffered() const { return buffer_.size(); }

  private:
    struct Discovery {
        int tries = 0;
        EventId timer = 0;
    };

    void try_send(Packet data);
    void forward_data(Packet pkt, NodeId from);
    void process_rreq(const Packet& pkt, NodeId from);
    void process_rrep(const Packet& pkt, NodeId from);
    void process_rerr(const Packet& pkt, NodeId from);
    void start_discovery(NodeId dst);
    void send_rreq(NodeId dst);
    void retry_discovery(NodeId dst);
    void send_rerr(const std::vector<NodeId>& route, std::size_t broken_at);
    void expire_buffer();

    DsrRouteCache cache_;
    SendBuffer buffer_;
    std::uint32_t rreq_counter_ = 0;
    std::set<std::pair<NodeId, std::uint32_t>> seen_;
    std::map<NodeId, Discovery> discovery_;
};

}  // namespace manet

#endif
