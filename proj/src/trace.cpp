#include "manetsim/trace.hpp"

#include <cstdio>
#include <ostream>

namespace manet {

std::string_view packet_type_token(PacketType t) {
    switch (t) {
        case PacketType::CbrData: return "cbr";
        case PacketType::DsdvUpdate: return "dsdv_update";
        case PacketType::DsrRreq: return "dsr_rreq";
        case PacketType::DsrRrep: return "dsr_rrep";
        case PacketType::DsrRerr: return "dsr_rerr";
        case PacketType::AodvRreq: return "aodv_rreq";
        case PacketType::AodvRrep: return "aodv_rrep";
        case PacketType::AodvRerr: return "aodv_rerr";
        case PacketType::AodvHello: return "aodv_hello";
    }
    return "?";
}

bool is_control(PacketType t) { return t != PacketType::CbrData; }

void write_trace(const TraceLog& trace, std::ostream& out) {
    char buf[160];
    for (const TraceRecord& rec : trace.records()) {
        std::snprintf(buf, sizeof buf, "%.6f %c %d %s %s %llu %d\n", rec.t,
                      static_cast<char>(rec.op), rec.node,
                      rec.layer == TraceLayer::AGT ? "AGT" : "RTR",
                      packet_type_token(rec.ptype).data(),
                      static_cast<unsigned long long>(rec.uid), rec.size);
        out << buf;
    }
}

}  // namespace manet
