#include "manetsim/dsdv.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <utility>

namespace manet {

void DsdvAgent::start() {
    // First full dump at the first trigger slot. Every advertisement — dump
    // or triggered flush — fires on the shared grid (see request_trigger),
    // which pins the relay latency of an update wave to exactly one slot per
    // hop and keeps sequence-number waves breadth-first.
    env_.engine->schedule(env_.now() + kTriggerSlot, EventKind::PeriodicUpdate,
                          [this] { periodic_update(); });
}

void DsdvAgent::originate(const Packet& data) {
    forward_data(data);
}

void DsdvAgent::receive(const Packet& pkt, NodeId from) {
    last_heard_[from] = env_.now();
    switch (pkt.ptype) {
        case PacketType::DsdvUpdate:
            process_update(static_cast<const DsdvUpdatePayload&>(*pkt.payload), from);
            break;
        case PacketType::CbrData: {
            if (pkt.dst == self_) {
                deliver_local(pkt);
                return;
            }
            Packet fwd = pkt;
            if (--fwd.ttl <= 0) {
                drop(fwd);
                return;
            }
            forward_data(fwd);
            break;
        }
        default:
            break;  // not ours; ignore
    }
}

void DsdvAgent::periodic_update() {
    SimTime now = env_.now();

    // Declare neighbours dead after two silent periods; the resulting broken
    // entries ride in the full dump below.
    std::set<NodeId> hops;
    for (const auto& [dest, e] : table_) {
        if (e.metric < kDsdvInfMetric) hops.insert(e.next_hop);
    }
    for (NodeId h : hops) {
        auto heard = last_heard_.find(h);
        if (heard == last_heard_.end() || now - heard->second > kMissedPeriods * kPeriod) {
            handle_link_break(h);
        }
    }

    for (auto it = table_.begin(); it != table_.end();) {
        if (it->second.metric >= kDsdvInfMetric && now - it->second.broken_at > kBrokenPurge) {
            it = table_.erase(it);
        } else {
            ++it;
        }
    }

    own_seqno_ += 2;

    std::vector<DsdvRouteInfo> routes;
    routes.push_back(DsdvRouteInfo{self_, 0, own_seqno_});
    for (auto& [dest, e] : table_) {
        routes.push_back(DsdvRouteInfo{dest, e.metric, e.seqno});
        e.changed = false;
        e.settling = false;  // the full dump advertises everything
    }
    self_advert_pending_ = false;
    broadcast_update(routes);

    // Jittered period, snapped to the advertisement grid so dumps stay
    // slot-aligned with triggered flushes.
    SimTime next = now + kPeriod + env_.jitter->uniform(-kPeriodJitter, kPeriodJitter);
    next = std::round(next / kTriggerSlot) * kTriggerSlot;
    env_.engine->schedule(next, EventKind::PeriodicUpdate, [this] { periodic_update(); });
}

void DsdvAgent::process_update(const DsdvUpdatePayload& upd, NodeId from) {
    SimTime now = env_.now();
    for (const DsdvRouteInfo& r : upd.routes) {
        if (r.dest == self_) {
            // A node is the sole authority for its own sequence number: a
            // strictly fresher claim (a neighbour's odd break mark) is
            // outbid with a fresher even seqno. Equal seqnos are just the
            // network echoing this node's own advertisements and must not
            // feed back, or the counter would climb forever. Reissues are
            // damped by the settling time so a flurry of break marks cannot
            // inflate the counter either.
            if (r.seqno > own_seqno_) outbid_claim(r.seqno);
            continue;
        }

        int metric = r.metric >= kDsdvInfMetric ? kDsdvInfMetric : r.metric + 1;
        auto it = table_.find(r.dest);
        if (it == table_.end()) {
            if (metric >= kDsdvInfMetric) continue;  // broken advert for unknown dest
            DsdvEntry e;
            e.next_hop = from;
            e.metric = metric;
            e.seqno = r.seqno;
            e.install_time = now;
            e.changed = true;
            table_.emplace(r.dest, e);
            request_trigger();
            continue;
        }

        DsdvEntry& e = it->second;
        bool newer = r.seqno > e.seqno;
        bool better = r.seqno == e.seqno && metric < e.metric;
        if (!newer && !better) continue;

        e.next_hop = from;
        e.metric = metric;
        e.seqno = r.seqno;
        e.install_time = now;
        if (metric >= kDsdvInfMetric) e.broken_at = now;
        e.changed = true;
        if (newer) {
            // Every seqno-advancing change is advertised at the next
            // triggered flush; the hold-down in request_trigger keeps the
            // resulting fan-out to at most one update per node per gap.
            e.settling = false;
            request_trigger();
        } else {
            // Metric-only improvements settle first so route flutter does not
            // fan out as triggered updates.
            e.settling = true;
            e.settle_until = now + kSettlingTime;
            NodeId dest = r.dest;
            SimTime release = e.settle_until;
            env_.engine->schedule(release, EventKind::Timer, [this, dest, release] {
                auto sit = table_.find(dest);
                if (sit == table_.end()) return;
                DsdvEntry& se = sit->second;
                if (se.settling && se.changed && env_.now() + 1e-12 >= se.settle_until &&
                    release >= se.settle_until) {
                    se.settling = false;
                    request_trigger();
                }
            });
        }
    }
}

void DsdvAgent::forward_data(const Packet& pkt) {
    auto it = table_.find(pkt.dst);
    if (it == table_.end() || it->second.metric >= kDsdvInfMetric) {
        drop(pkt);  // no buffering: routeless data is discarded
        return;
    }
    NodeId next = it->second.next_hop;
    if (!env_.net->unicast(pkt, self_, next)) {
        handle_link_break(next);
        drop(pkt);
    }
}

void DsdvAgent::handle_link_break(NodeId lost) {
    SimTime now = env_.now();
    bool any = false;
    for (auto& [dest, e] : table_) {
        if (e.next_hop != lost || e.metric >= kDsdvInfMetric) continue;
        e.metric = kDsdvInfMetric;
        if (e.seqno % 2 == 0) e.seqno += 1;  // odd = break marked by a non-owner
        e.broken_at = now;
        e.changed = true;
        e.settling = false;
        any = true;
    }
    last_heard_.erase(lost);
    if (any) request_trigger();
}

void DsdvAgent::outbid_claim(std::int64_t heard_seqno) {
    pending_outbid_ = std::max(pending_outbid_, heard_seqno);
    if (defense_scheduled_) return;
    defense_scheduled_ = true;
    SimTime fire = std::max(env_.now(), last_defense_ + kSettlingTime);
    env_.engine->schedule(fire, EventKind::Timer, [this] { fire_defense(); });
}

void DsdvAgent::fire_defense() {
    defense_scheduled_ = false;
    last_defense_ = env_.now();
    std::int64_t heard = pending_outbid_;
    pending_outbid_ = -1;
    // A periodic dump issued meanwhile may already outbid everything heard.
    if (heard < own_seqno_) return;
    own_seqno_ = (heard % 2 != 0) ? heard + 1 : heard + 2;
    self_advert_pending_ = true;
    request_trigger();
}

void DsdvAgent::request_trigger() {
    if (trigger_pending_) return;
    trigger_pending_ = true;
    // Triggered flushes are paced to a fixed one-second grid shared by every
    // node: each emits at most one incremental update per slot, and changes
    // that accumulate while the flush waits ride in the same batch. The
    // shared grid also makes the per-hop relay latency of an update wave a
    // constant one slot, so a fresher sequence number can never arrive first
    // over a longer path: table metrics stay shortest-path even mid-wave. A
    // randomized hold-down would stagger nodes and occasionally invert wave
    // order; with a collision-free link layer, synchronized slots cost
    // nothing.
    SimTime fire = (std::floor((env_.now() + kTriggerDelay) / kTriggerSlot) + 1.0) * kTriggerSlot;
    env_.engine->schedule(fire, EventKind::Timer, [this] { flush_trigger(); });
}

void DsdvAgent::flush_trigger() {
    trigger_pending_ = false;
    std::vector<DsdvRouteInfo> routes;
    routes.push_back(DsdvRouteInfo{self_, 0, own_seqno_});
    for (auto& [dest, e] : table_) {
        if (e.changed && !e.settling) {
            routes.push_back(DsdvRouteInfo{dest, e.metric, e.seqno});
            e.changed = false;
        }
    }
    if (routes.size() == 1 && !self_advert_pending_) return;
    self_advert_pending_ = false;
    broadcast_update(routes);
}

void DsdvAgent::broadcast_update(const std::vector<DsdvRouteInfo>& routes) {
    auto payload = std::make_shared<DsdvUpdatePayload>();
    payload->origin = self_;
    payload->routes = routes;

    Packet pkt;
    pkt.uid = env_.fresh_uid();
    pkt.ptype = PacketType::DsdvUpdate;
    pkt.src = self_;
    pkt.dst = kBroadcast;
    pkt.size = kUpdateBaseBytes + kUpdatePerRouteBytes * static_cast<int>(routes.size());
    pkt.ttl = 1;
    pkt.payload = std::move(payload);
    env_.net->broadcast(pkt, self_);
}

}  // namespace manet
