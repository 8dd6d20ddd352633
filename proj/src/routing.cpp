#include "manetsim/routing.hpp"

#include <algorithm>

namespace manet {

std::vector<Packet> SendBuffer::push(const Packet& pkt, SimTime now) {
    std::vector<Packet> evicted;
    if (items_.size() >= kCapacity) {
        evicted.push_back(items_.front().pkt);
        items_.pop_front();
    }
    items_.push_back(Item{pkt, now});
    return evicted;
}

std::vector<Packet> SendBuffer::take_for(NodeId dst) {
    std::vector<Packet> out;
    for (auto it = items_.begin(); it != items_.end();) {
        if (it->pkt.dst == dst) {
            out.push_back(it->pkt);
            it = items_.erase(it);
        } else {
            ++it;
        }
    }
    return out;
}

std::vector<Packet> SendBuffer::expire(SimTime now) {
    std::vector<Packet> out;
    while (!items_.empty() && now - items_.front().enqueued > kTimeout) {
        out.push_back(items_.front().pkt);
        items_.pop_front();
    }
    // Residence is FIFO by enqueue time, so the front check covers everything.
    return out;
}

bool SendBuffer::has_packets_for(NodeId dst) const {
    return std::any_of(items_.begin(), items_.end(),
                       [dst](const Item& it) { return it.pkt.dst == dst; });
}

}  // namespace manet
