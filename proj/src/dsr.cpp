#include "manetsim/dsr.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace manet {

namespace {

std::size_t index_of(const std::vector<NodeId>& route, NodeId node) {
    for (std::size_t i = 0; i < route.size(); ++i) {
        if (route[i] == node) return i;
    }
    return route.size();
}

}  // namespace

void DsrRouteCache::insert(const std::vector<NodeId>& route, SimTime now) {
    if (route.size() < 2) return;
    auto& routes = by_dest_[route.back()];
    for (auto& r : routes) {
        if (r.hops == route) {
            r.learned = now;  // refresh instead of duplicating
            return;
        }
    }
    routes.push_back(DsrCachedRoute{route, now});
    if (routes.size() > kMaxPerDest) {
        auto oldest = std::min_element(
            routes.begin(), routes.end(),
            [](const DsrCachedRoute& a, const DsrCachedRoute& b) { return a.learned < b.learned; });
        routes.erase(oldest);
    }
}

std::optional<std::vector<NodeId>> DsrRouteCache::lookup(NodeId self, NodeId dst,
                                                         SimTime now) const {
    auto it = by_dest_.find(dst);
    if (it == by_dest_.end()) return std::nullopt;
    const DsrCachedRoute* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& r : it->second) {
        if (now - r.learned > kExpiry) continue;
        std::size_t i = index_of(r.hops, self);
        if (i + 1 >= r.hops.size()) continue;  // self absent or self == dst
        std::size_t len = r.hops.size() - i;
        if (!best || len < best_len || (len == best_len && r.learned > best->learned)) {
            best = &r;
            best_len = len;
        }
    }
    if (!best) return std::nullopt;
    std::size_t i = index_of(best->hops, self);
    return std::vector<NodeId>(best->hops.begin() + static_cast<long>(i), best->hops.end());
}

void DsrRouteCache::purge_link(NodeId a, NodeId b) {
    for (auto it = by_dest_.begin(); it != by_dest_.end();) {
        auto& routes = it->second;
        routes.erase(std::remove_if(routes.begin(), routes.end(),
                                    [&](const DsrCachedRoute& r) {
                                        for (std::size_t i = 0; i + 1 < r.hops.size(); ++i) {
                                            NodeId u = r.hops[i], v = r.hops[i + 1];
                                            if ((u == a && v == b) || (u == b && v == a))
                                                return true;
                                        }
                                        return false;
                                    }),
                     routes.end());
        it = routes.empty() ? by_dest_.erase(it) : std::next(it);
    }
}

std::size_t DsrRouteCache::route_count() const {
    std::size_t n = 0;
    for (const auto& [dest, routes] : by_dest_) n += routes.size();
    return n;
}

const std::vector<DsrCachedRoute>* DsrRouteCache::routes_to(NodeId dst) const {
    auto it = by_dest_.find(dst);
    return it == by_dest_.end() ? nullptr : &it->second;
}

void DsrAgent::originate(const Packet& data) {
    expire_buffer();
    try_send(data);
}

void DsrAgent::receive(const Packet& pkt, NodeId from) {
    switch (pkt.ptype) {
        case PacketType::CbrData:
            forward_data(pkt, from);
            break;
        case PacketType::DsrRreq:
            process_rreq(pkt, from);
            break;
        case PacketType::DsrRrep:
            process_rrep(pkt, from);
            break;
        case PacketType::DsrRerr:
            process_rerr(pkt, from);
            break;
        default:
            break;
    }
}

void DsrAgent::try_send(Packet data) {
    // Each failed attempt purges the broken link from the cache, so this
    // terminates once the cached alternatives are exhausted.
    while (auto route = cache_.lookup(self_, data.dst, env_.now())) {
        auto sr = std::make_shared<DsrSourceRoute>();
        sr->route = *route;
        data.payload = sr;
        if (env_.net->unicast(data, self_, (*route)[1])) return;
        cache_.purge_link((*route)[0], (*route)[1]);
    }
    for (const Packet& evicted : buffer_.push(data, env_.now())) drop(evicted);
    if (!discovery_.count(data.dst)) start_discovery(data.dst);
}

void DsrAgent::forward_data(Packet pkt, NodeId from) {
    (void)from;
    if (pkt.dst == self_) {
        deliver_local(pkt);
        return;
    }
    const auto& route = static_cast<const DsrSourceRoute&>(*pkt.payload).route;
    std::size_t i = index_of(route, self_);
    if (i + 1 >= route.size()) {
        drop(pkt);  // not on this packet's source route
        return;
    }
    if (--pkt.ttl <= 0) {
        drop(pkt);
        return;
    }
    if (!env_.net->unicast(pkt, self_, route[i + 1])) {
        cache_.purge_link(route[i], route[i + 1]);
        send_rerr(route, i);
        drop(pkt);  // no salvaging
    }
}

void DsrAgent::process_rreq(const Packet& pkt, NodeId from) {
    const auto& req = static_cast<const DsrRreqPayload&>(*pkt.payload);
    if (!seen_.insert({req.origin, req.request_id}).second) return;
    if (index_of(req.record, self_) != req.record.size()) return;  // already traversed

    if (req.target == self_) {
        auto rep = std::make_shared<DsrRrepPayload>();
        rep->route = req.record;
        rep->route.push_back(self_);

        Packet rrep;
        rrep.uid = env_.fresh_uid();
        rrep.ptype = PacketType::DsrRrep;
        rrep.src = self_;
        rrep.dst = req.origin;
        rrep.size = kCtrlBaseBytes + kCtrlPerHopBytes * static_cast<int>(rep->route.size());
        rrep.ttl = kDataTtl;
        rrep.payload = rep;
        if (!env_.net->unicast(rrep, self_, from)) {
            cache_.purge_link(self_, from);
        }
        return;
    }

    Packet fwd = pkt;
    if (--fwd.ttl <= 0) return;
    auto rec = std::make_shared<DsrRreqPayload>(req);
    rec->record.push_back(self_);
    fwd.size = kCtrlBaseBytes + kCtrlPerHopBytes * static_cast<int>(rec->record.size());
    fwd.payload = rec;
    env_.net->broadcast(fwd, self_);
}

void DsrAgent::process_rrep(const Packet& pkt, NodeId from) {
    (void)from;
    const auto& route = static_cast<const DsrRrepPayload&>(*pkt.payload).route;
    cache_.insert(route, env_.now());

    if (route.front() == self_) {
        NodeId dst = route.back();
        auto it = discovery_.find(dst);
        if (it != discovery_.end()) {
            env_.engine->cancel(it->second.timer);
            discovery_.erase(it);
        }
        for (Packet& data : buffer_.take_for(dst)) try_send(data);
        return;
    }

    std::size_t i = index_of(route, self_);
    if (i == route.size() || i == 0) return;
    Packet fwd = pkt;
    if (--fwd.ttl <= 0) return;
    if (!env_.net->unicast(fwd, self_, route[i - 1])) {
        cache_.purge_link(route[i], route[i - 1]);
    }
}

void DsrAgent::process_rerr(const Packet& pkt, NodeId from) {
    (void)from;
    const auto& err = static_cast<const DsrRerrPayload&>(*pkt.payload);
    cache_.purge_link(err.broken_from, err.broken_to);

    std::size_t i = index_of(err.back_route, self_);
    if (i == err.back_route.size() || i + 1 == err.back_route.size()) return;
    Packet fwd = pkt;
    if (--fwd.ttl <= 0) return;
    if (!env_.net->unicast(fwd, self_, err.back_route[i + 1])) {
        cache_.purge_link(self_, err.back_route[i + 1]);
    }
}

void DsrAgent::start_discovery(NodeId dst) {
    discovery_[dst] = Discovery{};
    send_rreq(dst);
}

void DsrAgent::send_rreq(NodeId dst) {
    Discovery& d = discovery_[dst];
    d.tries += 1;

    auto req = std::make_shared<DsrRreqPayload>();
    req->origin = self_;
    req->request_id = ++rreq_counter_;
    req->target = dst;
    req->record.push_back(self_);
    seen_.insert({self_, req->request_id});

    Packet rreq;
    rreq.uid = env_.fresh_uid();
    rreq.ptype = PacketType::DsrRreq;
    rreq.src = self_;
    rreq.dst = kBroadcast;
    rreq.size = kCtrlBaseBytes + kCtrlPerHopBytes;
    rreq.ttl = kDataTtl;
    rreq.payload = req;
    env_.net->broadcast(rreq, self_);

    double backoff = std::min(kFirstBackoff * std::ldexp(1.0, d.tries - 1), kMaxBackoff);
    d.timer = env_.engine->schedule(env_.now() + backoff, EventKind::Timer,
                                    [this, dst] { retry_discovery(dst); });
}

void DsrAgent::retry_discovery(NodeId dst) {
    auto it = discovery_.find(dst);
    if (it == discovery_.end()) return;
    expire_buffer();
    if (!buffer_.has_packets_for(dst)) {
        discovery_.erase(it);
        return;
    }
    if (it->second.tries >= kMaxTries) {
        for (const Packet& data : buffer_.take_for(dst)) drop(data);
        discovery_.erase(it);
        return;
    }
    send_rreq(dst);
}

void DsrAgent::send_rerr(const std::vector<NodeId>& route, std::size_t broken_at) {
    if (broken_at == 0) return;  // the origin noticed directly
    auto err = std::make_shared<DsrRerrPayload>();
    err->broken_from = route[broken_at];
    err->broken_to = route[broken_at + 1];
    err->back_route.assign(route.rend() - static_cast<long>(broken_at) - 1, route.rend());

    Packet rerr;
    rerr.uid = env_.fresh_uid();
    rerr.ptype = PacketType::DsrRerr;
    rerr.src = self_;
    rerr.dst = route[0];
    rerr.size = kCtrlBaseBytes + kCtrlPerHopBytes * static_cast<int>(err->back_route.size());
    rerr.ttl = kDataTtl;
    rerr.payload = err;
    if (!env_.net->unicast(rerr, self_, err->back_route[1])) {
        cache_.purge_link(self_, err->back_route[1]);
    }
}

void DsrAgent::expire_buffer() {
    for (const Packet& data : buffer_.expire(env_.now())) drop(data);
}

}  // namespace manet
