#ifndef MANETSIM_TRACE_HPP
#define MANETSIM_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "manetsim/packet.hpp"

namespace manet {

enum class TraceOp : char { Send = 's', Receive = 'r', Forward = 'f', Drop = 'd' };

enum class TraceLayer { AGT, RTR };

struct TraceRecord {
    SimTime t = 0.0;
    TraceOp op = TraceOp::Send;
    NodeId node = 0;
    TraceLayer layer = TraceLayer::RTR;
    PacketType ptype = PacketType::CbrData;
    std::uint64_t uid = 0;
    int size = 0;
};

// Run-local event trace, appended in simulation order.
class TraceLog {
  public:
    void record(const TraceRecord& rec) { records_.push_back(rec); }
    const std::vector<TraceRecord>& records() const { return records_; }

  private:
    std::vector<TraceRecord> records_;
};

// Line format: `<t> <op> <node> <layer> <ptype> <uid> <size>`, t with 6
// decimal digits.
void write_trace(const TraceLog& trace, std::ostream& out);

}  // namespace manet

#endif
