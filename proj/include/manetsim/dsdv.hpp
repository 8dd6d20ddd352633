#ifndef MANETSIM_DSDV_HPP
#define MANETSIM_DSDV_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "manetsim/routing.hpp"

namespace manet {

inline constexpr int kDsdvInfMetric = std::numeric_limits<int>::max() / 2;

struct DsdvRouteInfo {
    NodeId dest;
    int metric;  // kDsdvInfMetric marks a broken route
    std::int64_t seqno;
};

struct DsdvUpdatePayload : PacketPayload {
    NodeId origin;
    std::vector<DsdvRouteInfo> routes;
};

struct DsdvEntry {
    NodeId next_hop;
    int metric;
    std::int64_t seqno;
    SimTime install_time = 0.0;
    SimTime broken_at = 0.0;     // meaningful while metric == kDsdvInfMetric
    bool changed = false;        // pending triggered advertisement
    bool settling = false;       // metric-only change held back until settle_until
    SimTime settle_until = 0.0;
};

class DsdvAgent : public RoutingAgent {
  public:
    static constexpr double kPeriod = 15.0;
    static constexpr double kPeriodJitter = 1.0;
    static constexpr double kSettlingTime = 5.0;
    static constexpr double kTriggerDelay = 0.01;
    static constexpr double kTriggerSlot = 1.0;
    static constexpr double kBrokenPurge = 30.0;
    static constexpr int kMissedPeriods = 2;
    static constexpr int kUpdateBaseBytes = 12;
    static constexpr int kUpdatePerRouteBytes = 12;

    DsdvAgent(NodeId self, SimServices& env) : RoutingAgent(self, env) {}

    void start() override;
    void originate(const Packet& data) override;
    void receive(const Packet& pkt, NodeId from) override;

    const std::map<NodeId, DsdvEntry>& table() const { return table_; }
    std::int64_t own_seqno() const { return own_seqno_; }

  private:
    void periodic_update();
    void process_update(const DsdvUpdatePayload& upd, NodeId from);
    void forward_data(const Packet& pkt);
    void handle_link_break(NodeId lost);
    void outbid_claim(std::int64_t heard_seqno);
    void fire_defense();
    void request_trigger();
    void flush_trigger();
    void broadcast_update(const std::vector<DsdvRouteInfo>& routes);

    std::map<NodeId, DsdvEntry> table_;
    std::map<NodeId, SimTime> last_heard_;
    std::int64_t own_seqno_ = 0;
    SimTime last_defense_ = -kSettlingTime;  // no defensive reissue yet
    std::int64_t pending_outbid_ = -1;
    bool defense_scheduled_ = false;
    bool self_advert_pending_ = false;
    bool trigger_pending_ = false;
};

}  // namespace manet

#endif
