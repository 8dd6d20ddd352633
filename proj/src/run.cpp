#include "manetsim/run.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "manetsim/trace.hpp"

namespace manet {

std::string_view protocol_token(Protocol p) {
    switch (p) {
        case Protocol::Dsdv: return "dsdv";
        case Protocol::Dsr: return "dsr";
        case Protocol::Aodv: return "aodv";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view s) {
    if (s == "dsdv") return Protocol::Dsdv;
    if (s == "dsr") return Protocol::Dsr;
    if (s == "aodv") return Protocol::Aodv;
    return std::nullopt;
}

std::string_view mobility_token(MobilityModel m) {
    return m == MobilityModel::RandomWalk ? "rw" : "rwp";
}

std::optional<MobilityModel> parse_mobility(std::string_view s) {
    if (s == "rw") return MobilityModel::RandomWalk;
    if (s == "rwp") return MobilityModel::RandomWaypoint;
    return std::nullopt;
}

void validate(const RunConfig& cfg) {
    if (cfg.n_nodes < 2) throw ConfigError("n_nodes: need at least 2 nodes");
    if (!(cfg.duration > 0.0)) throw ConfigError("duration: must be positive");
    if (cfg.conn_fraction < 0.0) throw ConfigError("conn_fraction: must be non-negative");
    try {
        validate(cfg.mobility);
        validate(cfg.area);
        validate(cfg.link);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

namespace {

Scenario default_scenario(const RunConfig& cfg) {
    validate(cfg);
    RandomStream rng(cfg.seed ^ seed_tag::kScenario);
    return generate_scenario(cfg.mobility, cfg.area, cfg.n_nodes, cfg.duration, rng);
}

std::vector<CbrConnection> default_connections(const RunConfig& cfg) {
    RandomStream rng(cfg.seed ^ seed_tag::kTraffic);
    return generate_connections(cfg.n_nodes, cfg.conn_fraction, rng);
}

}  // namespace

RunContext::RunContext(const RunConfig& cfg)
    : RunContext(cfg, default_scenario(cfg), default_connections(cfg)) {}

RunContext::RunContext(const RunConfig& cfg, Scenario scenario, std::vector<CbrConnection> conns)
    : cfg_((validate(cfg), cfg)),
      jitter_rng_(cfg.seed ^ seed_tag::kJitter),
      scenario_(std::move(scenario)),
      conns_(std::move(conns)),
      engine_(),
      trace_(),
      net_(engine_, scenario_, cfg.link, trace_) {
    if (static_cast<int>(scenario_.tracks.size()) != cfg_.n_nodes) {
        throw ConfigError("n_nodes: scenario covers a different node count");
    }

    services_.engine = &engine_;
    services_.net = &net_;
    services_.trace = &trace_;
    services_.jitter = &jitter_rng_;
    services_.duration = cfg_.duration;

    agents_.reserve(static_cast<std::size_t>(cfg_.n_nodes));
    for (NodeId n = 0; n < cfg_.n_nodes; ++n) {
        switch (cfg_.protocol) {
            case Protocol::Dsdv:
                agents_.push_back(std::make_unique<DsdvAgent>(n, services_));
                break;
            case Protocol::Dsr:
                agents_.push_back(std::make_unique<DsrAgent>(n, services_));
                break;
            case Protocol::Aodv:
                agents_.push_back(std::make_unique<AodvAgent>(n, services_));
                break;
        }
    }
    net_.set_delivery_handler([this](NodeId to, const Packet& pkt, NodeId from) {
        agents_[static_cast<std::size_t>(to)]->receive(pkt, from);
    });
}

const DsdvAgent* RunContext::dsdv(NodeId n) const {
    return dynamic_cast<const DsdvAgent*>(agents_.at(static_cast<std::size_t>(n)).get());
}

const DsrAgent* RunContext::dsr(NodeId n) const {
    return dynamic_cast<const DsrAgent*>(agents_.at(static_cast<std::size_t>(n)).get());
}

const AodvAgent* RunContext::aodv(NodeId n) const {
    return dynamic_cast<const AodvAgent*>(agents_.at(static_cast<std::size_t>(n)).get());
}

void RunContext::start() {
    if (started_) return;
    started_ = true;
    for (auto& a : agents_) a->start();
    for (std::size_t i = 0; i < conns_.size(); ++i) {
        if (conns_[i].start < cfg_.duration) schedule_tick(i, 0);
    }
}

void RunContext::schedule_tick(std::size_t conn, long k) {
    const CbrConnection& c = conns_[conn];
    SimTime t = c.start + static_cast<double>(k) * (1.0 / c.rate);
    engine_.schedule(t, EventKind::TrafficTick, [this, conn, k] {
        const CbrConnection& cc = conns_[conn];
        Packet pkt;
        pkt.uid = services_.fresh_uid();
        pkt.ptype = PacketType::CbrData;
        pkt.src = cc.src;
        pkt.dst = cc.dst;
        pkt.size = cc.size;
        pkt.ttl = kDataTtl;
        trace_.record(TraceRecord{engine_.now(), TraceOp::Send, cc.src, TraceLayer::AGT,
                                  PacketType::CbrData, pkt.uid, pkt.size});
        agents_[static_cast<std::size_t>(cc.src)]->originate(pkt);
        SimTime next = cc.start + static_cast<double>(k + 1) * (1.0 / cc.rate);
        if (next < cfg_.duration) schedule_tick(conn, k + 1);
    });
}

void RunContext::run() { run_to(cfg_.duration); }

void RunContext::run_to(SimTime t) {
    start();
    engine_.run_until(t);
}

RunMetrics run_single(const RunConfig& cfg) { return run_single(cfg, std::string()); }

RunMetrics run_single(const RunConfig& cfg, const std::string& trace_path) {
    RunContext ctx(cfg);
    ctx.run();
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw std::runtime_error("cannot open trace file: " + trace_path);
        write_trace(ctx.trace(), out);
    }
    return ctx.metrics();
}

std::size_t matrix_cell_count(const MatrixSpec& spec) {
    return spec.protocols.size() * spec.models.size() * spec.node_counts.size() *
           spec.speeds.size() * spec.fractions.size();
}

RunConfig cell_config(const MatrixSpec& spec, std::size_t cell, int replicate) {
    std::size_t n_frac = spec.fractions.size();
    std::size_t n_speed = spec.speeds.size();
    std::size_t n_nodes = spec.node_counts.size();
    std::size_t n_model = spec.models.size();

    std::size_t i = cell;
    std::size_t frac = i % n_frac;
    i /= n_frac;
    std::size_t speed = i % n_speed;
    i /= n_speed;
    std::size_t nodes = i % n_nodes;
    i /= n_nodes;
    std::size_t model = i % n_model;
    i /= n_model;
    std::size_t proto = i;

    RunConfig cfg;
    cfg.protocol = spec.protocols.at(proto);
    cfg.mobility.model = spec.models[model];
    cfg.mobility.speed_min = spec.speed_min;
    cfg.mobility.speed_max = spec.speeds[speed];
    cfg.mobility.pause_time =
        spec.models[model] == MobilityModel::RandomWaypoint ? spec.rwp_pause : 0.0;
    cfg.mobility.leg_duration = spec.leg_duration;
    cfg.n_nodes = spec.node_counts[nodes];
    cfg.area = spec.area;
    cfg.duration = spec.duration;
    cfg.conn_fraction = spec.fractions[frac];
    cfg.seed = spec.seed_base + cell * 1009 + static_cast<std::size_t>(replicate);
    cfg.link = spec.link;
    return cfg;
}

MatrixResult run_matrix(const MatrixSpec& spec, int jobs) {
    if (spec.protocols.empty() || spec.models.empty() || spec.node_counts.empty() ||
        spec.speeds.empty() || spec.fractions.empty() || spec.seeds <= 0) {
        throw ConfigError("matrix: every axis needs at least one value");
    }

    std::size_t cells = matrix_cell_count(spec);
    std::size_t total = cells * static_cast<std::size_t>(spec.seeds);

    struct Slot {
        bool ok = false;
        MatrixRow row;
        std::string error;
    };
    std::vector<Slot> slots(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            std::size_t cell = task / static_cast<std::size_t>(spec.seeds);
            int rep = static_cast<int>(task % static_cast<std::size_t>(spec.seeds));
            RunConfig cfg = cell_config(spec, cell, rep);
            Slot& slot = slots[task];
            try {
                RunMetrics m = run_single(cfg);
                slot.row = MatrixRow{cfg.protocol,
                                     cfg.mobility.model,
                                     cfg.n_nodes,
                                     cfg.mobility.speed_max,
                                     cfg.mobility.pause_time,
                                     cfg.conn_fraction,
                                     cfg.seed,
                                     m};
                slot.ok = true;
            } catch (const std::exception& e) {
                slot.error = e.what();
            }
        }
    };

    int n_threads = std::max(1, jobs);
    if (static_cast<std::size_t>(n_threads) > total) n_threads = static_cast<int>(total);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads - 1));
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    MatrixResult result;
    result.rows.reserve(total);
    for (std::size_t task = 0; task < total; ++task) {
        if (slots[task].ok) {
            result.rows.push_back(slots[task].row);
        } else {
            result.failures.push_back(
                MatrixFailure{task / static_cast<std::size_t>(spec.seeds),
                              static_cast<int>(task % static_cast<std::size_t>(spec.seeds)),
                              slots[task].error});
        }
    }
    return result;
}

const char* const kCsvHeader =
    "protocol,mobility,nodes,speed_max,pause,conn_frac,seed,sent,received,routing_tx,pdr,nro,"
    "throughput";

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(std::string_view s, const char* field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw CsvFormatError(std::string("bad ") + field + ": " + std::string(s));
    }
    return v;
}

long long parse_ll(std::string_view s, const char* field) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw CsvFormatError(std::string("bad ") + field + ": " + std::string(s));
    }
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

std::string csv_row(const MatrixRow& r) {
    std::string out;
    out += protocol_token(r.protocol);
    out += ',';
    out += mobility_token(r.model);
    out += ',';
    out += std::to_string(r.nodes);
    out += ',';
    out += fmt_double(r.speed_max);
    out += ',';
    out += fmt_double(r.pause);
    out += ',';
    out += fmt_double(r.conn_frac);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.m.sent);
    out += ',';
    out += std::to_string(r.m.received);
    out += ',';
    out += std::to_string(r.m.routing_tx);
    out += ',';
    out += fmt_double(r.m.pdr);
    out += ',';
    out += r.m.nro ? fmt_double(*r.m.nro) : "NA";
    out += ',';
    out += fmt_double(r.m.throughput);
    return out;
}

MatrixRow parse_csv_row(const std::string& line) {
    auto f = split_csv(line);
    if (f.size() != 13) throw CsvFormatError("expected 13 fields, got " + std::to_string(f.size()));
    MatrixRow r;
    auto proto = parse_protocol(f[0]);
    if (!proto) throw CsvFormatError("bad protocol: " + std::string(f[0]));
    r.protocol = *proto;
    auto model = parse_mobility(f[1]);
    if (!model) throw CsvFormatError("bad mobility: " + std::string(f[1]));
    r.model = *model;
    r.nodes = static_cast<int>(parse_ll(f[2], "nodes"));
    r.speed_max = parse_double(f[3], "speed_max");
    r.pause = parse_double(f[4], "pause");
    r.conn_frac = parse_double(f[5], "conn_frac");
    r.seed = static_cast<std::uint64_t>(parse_ll(f[6], "seed"));
    r.m.sent = parse_ll(f[7], "sent");
    r.m.received = parse_ll(f[8], "received");
    r.m.routing_tx = parse_ll(f[9], "routing_tx");
    r.m.pdr = parse_double(f[10], "pdr");
    if (f[11] != "NA") r.m.nro = parse_double(f[11], "nro");
    r.m.throughput = parse_double(f[12], "throughput");
    return r;
}

void write_results_csv(std::ostream& out, const std::vector<MatrixRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << csv_row(r) << '\n';
}

std::vector<MatrixRow> read_results_csv(std::istream& in) {
    std::vector<MatrixRow> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    if (line != kCsvHeader) throw CsvFormatError("bad header: " + line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_csv_row(line));
    }
    return rows;
}

std::vector<CellSummary> summarize(const std::vector<MatrixRow>& rows) {
    using Key = std::tuple<int, int, int, double, double, double>;
    std::map<Key, std::vector<const MatrixRow*>> groups;
    for (const auto& r : rows) {
        groups[Key{static_cast<int>(r.protocol), static_cast<int>(r.model), r.nodes, r.speed_max,
                   r.pause, r.conn_frac}]
            .push_back(&r);
    }
    std::vector<CellSummary> cells;
    cells.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        CellSummary c;
        c.protocol = members.front()->protocol;
        c.model = members.front()->model;
        c.nodes = members.front()->nodes;
        c.speed_max = members.front()->speed_max;
        c.pause = members.front()->pause;
        c.conn_frac = members.front()->conn_frac;
        c.runs = static_cast<int>(members.size());
        std::vector<double> pdr, nro, tput;
        for (const MatrixRow* r : members) {
            pdr.push_back(r->m.pdr);
            tput.push_back(r->m.throughput);
            if (r->m.nro) nro.push_back(*r->m.nro);
        }
        c.pdr = aggregate(pdr);
        c.throughput = aggregate(tput);
        if (!nro.empty()) c.nro = aggregate(nro);
        cells.push_back(c);
    }
    return cells;
}

void write_summary(std::ostream& out, const std::vector<CellSummary>& cells) {
    char buf[256];
    out << "protocol mobility nodes speed pause frac runs"
           " pdr_mean pdr_sd nro_mean nro_sd tput_mean tput_sd\n";
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%-8s %-8s %5d %5g %5g %4g %4d",
                      std::string(protocol_token(c.protocol)).c_str(),
                      std::string(mobility_token(c.model)).c_str(), c.nodes, c.speed_max, c.pause,
                      c.conn_frac, c.runs);
        out << buf;
        auto stat = [&](const Aggregate& a) {
            std::snprintf(buf, sizeof buf, " %8.4f %6.4f", a.mean,
                          a.stddev ? *a.stddev : 0.0);
            out << buf;
        };
        stat(c.pdr);
        if (c.nro) {
            stat(*c.nro);
        } else {
            out << "       NA     NA";
        }
        stat(c.throughput);
        out << '\n';
    }
}

void write_plot_data(const std::string& dir, const std::vector<CellSummary>& cells) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    // Axes present in the summaries.
    std::vector<int> nodes;
    std::vector<double> speeds, fracs;
    std::vector<std::pair<MobilityModel, double>> models;  // (model, pause)
    std::vector<Protocol> protos;
    auto add_unique = [](auto& vec, auto v) {
        if (std::find(vec.begin(), vec.end(), v) == vec.end()) vec.push_back(v);
    };
    for (const auto& c : cells) {
        add_unique(nodes, c.nodes);
        add_unique(speeds, c.speed_max);
        add_unique(fracs, c.conn_frac);
        add_unique(models, std::make_pair(c.model, c.pause));
        add_unique(protos, c.protocol);
    }
    std::sort(nodes.begin(), nodes.end());
    std::sort(speeds.begin(), speeds.end());
    std::sort(fracs.begin(), fracs.end());

    auto find_cell = [&](Protocol p, MobilityModel m, double pause, int n, double s,
                         double f) -> const CellSummary* {
        for (const auto& c : cells) {
            if (c.protocol == p && c.model == m && c.pause == pause && c.nodes == n &&
                c.speed_max == s && c.conn_frac == f) {
                return &c;
            }
        }
        return nullptr;
    };

    const char* metric_names[] = {"pdr", "nro", "throughput"};
    for (int metric = 0; metric < 3; ++metric) {
        for (const auto& [model, pause] : models) {
            for (double s : speeds) {
                for (double f : fracs) {
                    std::string name = std::string(metric_names[metric]) + "_" +
                                       std::string(mobility_token(model)) + "_p" +
                                       fmt_double(pause) + "_s" + fmt_double(s) + "_f" +
                                       fmt_double(f) + ".dat";
                    std::ofstream out(fs::path(dir) / name);
                    out << "# nodes";
                    for (Protocol p : protos) out << ' ' << protocol_token(p);
                    out << '\n';
                    for (int n : nodes) {
                        out << n;
                        for (Protocol p : protos) {
                            const CellSummary* c = find_cell(p, model, pause, n, s, f);
                            if (!c) {
                                out << " NA";
                            } else if (metric == 0) {
                                out << ' ' << fmt_double(c->pdr.mean);
                            } else if (metric == 1) {
                                out << ' ' << (c->nro ? fmt_double(c->nro->mean) : "NA");
                            } else {
                                out << ' ' << fmt_double(c->throughput.mean);
                            }
                        }
                        out << '\n';
                    }
                }
            }
        }
    }
}

}  // namespace manet
