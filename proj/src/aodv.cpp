#include "manetsim/aodv.hpp"

#include <algorithm>
#include <memory>

namespace manet {

namespace {

Packet make_ctrl(std::uint64_t uid, PacketType t, NodeId src, NodeId dst, int size, int ttl,
                 std::shared_ptr<const PacketPayload> payload) {
    Packet pkt;
    pkt.uid = uid;
    pkt.ptype = t;
    pkt.src = src;
    pkt.dst = dst;
    pkt.size = size;
    pkt.ttl = ttl;
    pkt.payload = std::move(payload);
    return pkt;
}

}  // namespace

void AodvAgent::start() {
    env_.engine->schedule(env_.now() + kHelloInterval, EventKind::Timer,
                          [this] { hello_tick(); });
}

AodvEntry* AodvAgent::valid_route(NodeId dst) {
    auto it = table_.find(dst);
    if (it == table_.end()) return nullptr;
    AodvEntry& e = it->second;
    if (e.valid && e.lifetime <= env_.now()) {
        e.valid = false;  // lazy expiry; seqno bump marks the route stale
        e.seqno += 1;
        e.precursors.clear();
    }
    return e.valid ? &e : nullptr;
}

AodvEntry& AodvAgent::adopt_if_fresher(NodeId dst, const AodvEntry& cand) {
    auto it = table_.find(dst);
    if (it == table_.end()) {
        return table_.emplace(dst, cand).first->second;
    }
    AodvEntry& e = it->second;
    bool take;
    if (!e.valid) {
        take = cand.seqno >= e.seqno;
    } else {
        take = std::make_pair(cand.seqno, -cand.hop_count) >
               std::make_pair(e.seqno, -e.hop_count);
    }
    if (take) {
        auto precursors = std::move(e.precursors);  // survive the replacement
        e = cand;
        e.precursors = std::move(precursors);
    } else if (e.valid && cand.valid && e.seqno == cand.seqno && e.hop_count == cand.hop_count &&
               e.next_hop == cand.next_hop) {
        e.lifetime = std::max(e.lifetime, cand.lifetime);
    }
    return e;
}

void AodvAgent::refresh(NodeId dst) {
    auto it = table_.find(dst);
    if (it != table_.end() && it->second.valid) {
        it->second.lifetime =
            std::max(it->second.lifetime, env_.now() + kActiveRouteTimeout);
    }
}

void AodvAgent::originate(const Packet& data) {
    expire_buffer();
    if (AodvEntry* e = valid_route(data.dst)) {
        refresh(data.dst);
        refresh(e->next_hop);
        NodeId next = e->next_hop;
        if (env_.net->unicast(data, self_, next)) return;
        link_failure(next);
    }
    for (const Packet& evicted : buffer_.push(data, env_.now())) drop(evicted);
    if (!discovery_.count(data.dst)) start_discovery(data.dst);
}

void AodvAgent::receive(const Packet& pkt, NodeId from) {
    last_heard_[from] = env_.now();
    switch (pkt.ptype) {
        case PacketType::CbrData:
            forward_data(pkt, from);
            break;
        case PacketType::AodvRreq:
            process_rreq(pkt, from);
            break;
        case PacketType::AodvRrep:
            process_rrep(pkt, from);
            break;
        case PacketType::AodvRerr:
            process_rerr(pkt, from);
            break;
        case PacketType::AodvHello:
            break;  // liveness only, recorded above
        default:
            break;
    }
}

void AodvAgent::forward_data(Packet pkt, NodeId from) {
    if (pkt.dst == self_) {
        refresh(pkt.src);  // an active destination keeps its reverse route alive
        deliver_local(pkt);
        return;
    }
    AodvEntry* e = valid_route(pkt.dst);
    if (!e) {
        // Mid-flight miss: tell upstream the route is gone.
        auto it = table_.find(pkt.dst);
        std::int64_t seq = it != table_.end() ? it->second.seqno : 1;
        auto err = std::make_shared<AodvRerrPayload>();
        err->unreachable.push_back({pkt.dst, seq});
        Packet rerr = make_ctrl(env_.fresh_uid(), PacketType::AodvRerr, self_, from, kRerrBytes,
                                1, err);
        env_.net->unicast(rerr, self_, from);
        drop(pkt);
        return;
    }
    refresh(pkt.dst);
    refresh(pkt.src);
    refresh(e->next_hop);
    NodeId next = e->next_hop;
    if (--pkt.ttl <= 0) {
        drop(pkt);
        return;
    }
    if (!env_.net->unicast(pkt, self_, next)) {
        link_failure(next);
        drop(pkt);
    }
}

void AodvAgent::process_rreq(const Packet& pkt, NodeId from) {
    const auto& req = static_cast<const AodvRreqPayload&>(*pkt.payload);
    if (!seen_.insert({req.origin, req.rreq_id}).second) return;

    AodvEntry reverse;
    reverse.next_hop = from;
    reverse.hop_count = req.hop_count + 1;
    reverse.seqno = req.origin_seqno;
    reverse.lifetime = env_.now() + kReverseRouteLife;
    reverse.valid = true;
    adopt_if_fresher(req.origin, reverse);

    if (req.dest == self_) {
        if (req.dest_seqno) own_seqno_ = std::max(own_seqno_, *req.dest_seqno);
        auto rep = std::make_shared<AodvRrepPayload>();
        rep->dest = self_;
        rep->dest_seqno = own_seqno_;
        rep->origin = req.origin;
        rep->hop_count = 0;
        rep->lifetime = kActiveRouteTimeout;
        Packet rrep = make_ctrl(env_.fresh_uid(), PacketType::AodvRrep, self_, req.origin,
                                kRrepBytes, kDataTtl, rep);
        if (!env_.net->unicast(rrep, self_, from)) link_failure(from);
        return;
    }

    AodvEntry* e = valid_route(req.dest);
    if (e && (!req.dest_seqno || e->seqno >= *req.dest_seqno)) {
        // Intermediate reply from a route at least as fresh as requested.
        auto rep = std::make_shared<AodvRrepPayload>();
        rep->dest = req.dest;
        rep->dest_seqno = e->seqno;
        rep->origin = req.origin;
        rep->hop_count = e->hop_count;
        rep->lifetime = e->lifetime - env_.now();
        e->precursors.insert(from);
        auto rit = table_.find(req.origin);
        if (rit != table_.end()) rit->second.precursors.insert(e->next_hop);
        Packet rrep = make_ctrl(env_.fresh_uid(), PacketType::AodvRrep, self_, req.origin,
                                kRrepBytes, kDataTtl, rep);
        if (!env_.net->unicast(rrep, self_, from)) link_failure(from);
        return;
    }

    Packet fwd = pkt;
    if (--fwd.ttl <= 0) return;
    auto hop = std::make_shared<AodvRreqPayload>(req);
    hop->hop_count += 1;
    fwd.payload = hop;
    env_.net->broadcast(fwd, self_);
}

void AodvAgent::process_rrep(const Packet& pkt, NodeId from) {
    const auto& rep = static_cast<const AodvRrepPayload&>(*pkt.payload);

    AodvEntry forward;
    forward.next_hop = from;
    forward.hop_count = rep.hop_count + 1;
    forward.seqno = rep.dest_seqno;
    forward.lifetime = env_.now() + std::max(rep.lifetime, 0.0);
    forward.valid = true;
    AodvEntry& installed = adopt_if_fresher(rep.dest, forward);

    if (rep.origin == self_) {
        auto it = discovery_.find(rep.dest);
        if (it != discovery_.end()) {
            env_.engine->cancel(it->second.timer);
            discovery_.erase(it);
        }
        for (Packet& data : buffer_.take_for(rep.dest)) originate(data);
        return;
    }

    AodvEntry* rev = valid_route(rep.origin);
    if (!rev) return;  // reverse path aged out; the origin's ring retries
    installed.precursors.insert(rev->next_hop);
    rev->lifetime = std::max(rev->lifetime, env_.now() + kActiveRouteTimeout);

    Packet fwd = pkt;
    if (--fwd.ttl <= 0) return;
    auto hop = std::make_shared<AodvRrepPayload>(rep);
    hop->hop_count += 1;
    fwd.payload = hop;
    if (!env_.net->unicast(fwd, self_, rev->next_hop)) link_failure(rev->next_hop);
}

void AodvAgent::process_rerr(const Packet& pkt, NodeId from) {
    const auto& err = static_cast<const AodvRerrPayload&>(*pkt.payload);
    std::vector<std::pair<NodeId, std::int64_t>> dead;
    std::set<NodeId> notify;
    for (const auto& [dst, seq] : err.unreachable) {
        auto it = table_.find(dst);
        if (it == table_.end()) continue;
        AodvEntry& e = it->second;
        if (!e.valid || e.next_hop != from) continue;
        e.valid = false;
        e.seqno = std::max(e.seqno + 1, seq);
        dead.push_back({dst, e.seqno});
        notify.insert(e.precursors.begin(), e.precursors.end());
        e.precursors.clear();
    }
    if (!dead.empty()) send_rerr(dead, notify);
}

void AodvAgent::hello_tick() {
    SimTime now = env_.now();

    // Declare next hops silent for two intervals dead.
    std::set<NodeId> hops;
    for (auto& [dst, e] : table_) {
        if (e.valid && e.lifetime > now) hops.insert(e.next_hop);
    }
    for (NodeId h : hops) {
        auto heard = last_heard_.find(h);
        if (heard == last_heard_.end() ||
            now - heard->second > kAllowedHelloLoss * kHelloInterval) {
            link_failure(h);
        }
    }

    bool active = false;
    for (auto& [dst, e] : table_) {
        if (e.valid && e.lifetime > now) {
            active = true;
            break;
        }
    }
    if (active) {
        Packet hello = make_ctrl(env_.fresh_uid(), PacketType::AodvHello, self_, kBroadcast,
                                 kHelloBytes, 1, std::make_shared<AodvHelloPayload>());
        env_.net->broadcast(hello, self_);
    }

    env_.engine->schedule(now + kHelloInterval, EventKind::Timer, [this] { hello_tick(); });
}

void AodvAgent::start_discovery(NodeId dst) {
    discovery_[dst] = Discovery{};
    send_rreq(dst);
}

void AodvAgent::send_rreq(NodeId dst) {
    Discovery& d = discovery_[dst];
    int ttl = kRingTtls[static_cast<std::size_t>(d.attempt)];

    own_seqno_ += 1;
    rreq_id_ += 1;
    seen_.insert({self_, rreq_id_});

    auto req = std::make_shared<AodvRreqPayload>();
    req->origin = self_;
    req->rreq_id = rreq_id_;
    req->origin_seqno = own_seqno_;
    req->dest = dst;
    auto it = table_.find(dst);
    if (it != table_.end()) req->dest_seqno = it->second.seqno;
    req->hop_count = 0;

    Packet rreq = make_ctrl(env_.fresh_uid(), PacketType::AodvRreq, self_, kBroadcast,
                            kRreqBytes, ttl, req);
    env_.net->broadcast(rreq, self_);

    double timeout = 2.0 * ttl * env_.net->link().hop_latency * kNodeTraversalFactor;
    d.timer = env_.engine->schedule(env_.now() + timeout, EventKind::Timer,
                                    [this, dst] { ring_timeout(dst); });
}

void AodvAgent::ring_timeout(NodeId dst) {
    auto it = discovery_.find(dst);
    if (it == discovery_.end()) return;
    expire_buffer();
    if (!buffer_.has_packets_for(dst)) {
        discovery_.erase(it);
        return;
    }
    it->second.attempt += 1;
    if (it->second.attempt >= static_cast<int>(kRingTtls.size())) {
        for (const Packet& data : buffer_.take_for(dst)) drop(data);
        discovery_.erase(it);
        return;
    }
    send_rreq(dst);
}

void AodvAgent::link_failure(NodeId lost) {
    std::vector<std::pair<NodeId, std::int64_t>> dead;
    std::set<NodeId> notify;
    for (auto& [dst, e] : table_) {
        if (!e.valid || e.next_hop != lost) continue;
        e.valid = false;
        e.seqno += 1;
        dead.push_back({dst, e.seqno});
        notify.insert(e.precursors.begin(), e.precursors.end());
        e.precursors.clear();
    }
    last_heard_.erase(lost);
    if (!dead.empty()) send_rerr(dead, notify);
}

void AodvAgent::send_rerr(const std::vector<std::pair<NodeId, std::int64_t>>& unreachable,
                          const std::set<NodeId>& precursors) {
    if (precursors.empty()) return;
    auto err = std::make_shared<AodvRerrPayload>();
    err->unreachable = unreachable;
    if (precursors.size() == 1) {
        NodeId to = *precursors.begin();
        Packet rerr = make_ctrl(env_.fresh_uid(), PacketType::AodvRerr, self_, to, kRerrBytes,
                                1, err);
        env_.net->unicast(rerr, self_, to);  // best effort
    } else {
        Packet rerr = make_ctrl(env_.fresh_uid(), PacketType::AodvRerr, self_, kBroadcast,
                                kRerrBytes, 1, err);
        env_.net->broadcast(rerr, self_);
    }
}

void AodvAgent::expire_buffer() {
    for (const Packet& data : buffer_.expire(env_.now())) drop(data);
}

}  // namespace manet
