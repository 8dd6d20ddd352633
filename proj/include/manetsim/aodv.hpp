#ifndef MANETSIM_AODV_HPP
#define MANETSIM_AODV_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manetsim/routing.hpp"

namespace manet {

struct AodvRreqPayload : PacketPayload {
    NodeId origin;
    std::uint32_t rreq_id;
    std::int64_t origin_seqno;
    NodeId dest;
    std::optional<std::int64_t> dest_seqno;  // unknown on a first discovery
    int hop_count;
};

struct AodvRrepPayload : PacketPayload {
    NodeId dest;
    std::int64_t dest_seqno;
    NodeId origin;
    int hop_count;
    double lifetime;  // remaining, in seconds
};

struct AodvRerrPayload : PacketPayload {
    std::vector<std::pair<NodeId, std::int64_t>> unreachable;  // (dest, seqno)
};

struct AodvHelloPayload : PacketPayload {};

struct AodvEntry {
    NodeId next_hop{};
    int hop_count = 0;
    std::int64_t seqno = 0;
    SimTime lifetime = 0.0;  // absolute expiry
    bool valid = false;
    std::set<NodeId> precursors;
};

class AodvAgent : public RoutingAgent {
  public:
    static constexpr double kHelloInterval = 1.0;
    static constexpr int kAllowedHelloLoss = 2;
    static constexpr double kActiveRouteTimeout = 10.0;
    static constexpr double kReverseRouteLife = 3.0;
    static constexpr int kNodeTraversalFactor = 20;
    static constexpr std::array<int, 6> kRingTtls = {1, 3, 5, 7, 35, 35};
    static constexpr int kRreqBytes = 24;
    static constexpr int kRrepBytes = 20;
    static constexpr int kRerrBytes = 12;
    static constexpr int kHelloBytes = 12;

    AodvAgent(NodeId self, SimServices& env) : RoutingAgent(self, env) {}

    void start() override;
    void originate(const Packet& data) override;
    void receive(const Packet& pkt, NodeId from) override;

    const std::map<NodeId, AodvEntry>& table() const { return table_; }
    std::int64_t own_seqno() const { return own_seqno_; }

  private:
    struct Discovery {
        int attempt = 0;  // index into kRingTtls of the ring in flight
        EventId timer = 0;
    };

    AodvEntry* valid_route(NodeId dst);
    // Installs cand for dst unless the existing entry is valid and at least
    // as fresh under the (seqno, -hop_count) order. Returns the live entry.
    AodvEntry& adopt_if_fresher(NodeId dst, const AodvEntry& cand);
    void refresh(NodeId dst);

    void forward_data(Packet pkt, NodeId from);
    void process_rreq(const Packet& pkt, NodeId from);
    void process_rrep(const Packet& pkt, NodeId from);
    void process_rerr(const Packet& pkt, NodeId from);
    void hello_tick();
    void start_discovery(NodeId dst);
    void send_rreq(NodeId dst);
    void ring_timeout(NodeId dst);
    void link_failure(NodeId lost);
    void send_rerr(const std::vector<std::pair<NodeId, std::int64_t>>& unreachable,
                   const std::set<NodeId>& precursors);
    void expire_buffer();

    std::map<NodeId, AodvEntry> table_;
    std::map<NodeId, SimTime> last_heard_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_;
    std::map<NodeId, Discovery> discovery_;
    SendBuffer buffer_;
    std::int64_t own_seqno_ = 0;
    std::uint32_t rreq_id_ = 0;
};

}  // namespace manet

#endif
