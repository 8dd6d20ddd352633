#ifndef MANETSIM_PACKET_HPP
#define MANETSIM_PACKET_HPP

#include <cstdint>
#include <memory>
#include <string_view>

#include "manetsim/mobility.hpp"

namespace manet {

inline constexpr NodeId kBroadcast = -1;

enum class PacketType {
    CbrData,
    DsdvUpdate,
    DsrRreq,
    DsrRrep,
    DsrRerr,
    AodvRreq,
    AodvRrep,
    AodvRerr,
    AodvHello,
};

std::string_view packet_type_token(PacketType t);
bool is_control(PacketType t);

// Base for protocol-specific payload records; carried by shared pointer so
// broadcast fan-out copies stay cheap.
struct PacketPayload {
    PacketPayload() = default;
    PacketPayload(const PacketPayload&) = default;
    PacketPayload& operator=(const PacketPayload&) = default;
    virtual ~PacketPayload() = default;
};

struct Packet {
    std::uint64_t uid = 0;  // run-unique, stable across forwards
    PacketType ptype = PacketType::CbrData;
    NodeId src = 0;
    NodeId dst = kBroadcast;
    int size = 0;  // bytes
    int ttl = 0;   // hop budget
    std::shared_ptr<const PacketPayload> payload;
};

}  // namespace manet

#endif
