// End-to-end acceptance checks: one PASS/FAIL line per criterion, exit code
// equals the number of failures. The expensive suites share thread pools and
// the cell runs reuse paired seeds so protocols face identical scenarios.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "manetsim/run.hpp"

using namespace manet;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("C%d %s — %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

int pool_jobs() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 4 : static_cast<int>(hw);
}

void parallel_for(std::size_t total, int jobs, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            fn(i);
        }
    };
    int n = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

struct CellKey {
    Protocol protocol;
    MobilityModel model;
    double pause;
    int nodes;
    double speed;
    double frac;
};

RunConfig cell_run_config(const CellKey& key, int rep) {
    RunConfig cfg;
    cfg.protocol = key.protocol;
    cfg.mobility.model = key.model;
    cfg.mobility.speed_min = 0.0;
    cfg.mobility.speed_max = key.speed;
    cfg.mobility.pause_time = key.pause;
    cfg.mobility.leg_duration = 10.0;
    cfg.n_nodes = key.nodes;
    cfg.area = AreaBounds{670.0, 670.0};
    cfg.duration = 200.0;
    cfg.conn_fraction = key.frac;
    cfg.seed = static_cast<std::uint64_t>(rep) + 1;  // paired across protocols
    return cfg;
}

struct CellRuns {
    std::vector<RunMetrics> runs;
    std::vector<std::string> errors;
};

CellRuns run_cell(const CellKey& key, int seeds, int jobs) {
    CellRuns out;
    out.runs.resize(static_cast<std::size_t>(seeds));
    std::vector<std::string> errs(static_cast<std::size_t>(seeds));
    parallel_for(static_cast<std::size_t>(seeds), jobs, [&](std::size_t rep) {
        try {
            out.runs[rep] = run_single(cell_run_config(key, static_cast<int>(rep)));
        } catch (const std::exception& e) {
            errs[rep] = e.what();
        }
    });
    for (auto& e : errs) {
        if (!e.empty()) out.errors.push_back(std::move(e));
    }
    return out;
}

double mean_pdr(const CellRuns& c) {
    double s = 0.0;
    for (const auto& m : c.runs) s += m.pdr;
    return s / static_cast<double>(c.runs.size());
}

double mean_tput(const CellRuns& c) {
    double s = 0.0;
    for (const auto& m : c.runs) s += m.throughput;
    return s / static_cast<double>(c.runs.size());
}

std::optional<double> mean_nro(const CellRuns& c) {
    double s = 0.0;
    int n = 0;
    for (const auto& m : c.runs) {
        if (m.nro) {
            s += *m.nro;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return s / n;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// --- C6 helper: the static chain oracle -----------------------------------

bool chain_oracle(Protocol p, std::string& detail) {
    RunConfig cfg;
    cfg.protocol = p;
    cfg.n_nodes = 3;
    cfg.duration = 200.0;
    // DSDV needs its periodic exchange to settle (three cycles is generous);
    // the reactive pair only needs one discovery round-trip, which the send
    // buffer absorbs.
    double start = p == Protocol::Dsdv ? 46.0 : 1.0;
    Scenario scen = static_scenario({Vec2{0.0, 0.0}, Vec2{200.0, 0.0}, Vec2{400.0, 0.0}},
                                    cfg.area, cfg.duration);
    CbrConnection c;
    c.src = 0;
    c.dst = 2;
    c.start = start;
    RunContext ctx(cfg, std::move(scen), {c});
    ctx.run();

    RunMetrics m = ctx.metrics();
    if (m.pdr != 1.0) {
        detail = std::string(protocol_token(p)) + " pdr=" + fmt(m.pdr) + " (want 1.0)";
        return false;
    }
    // Every delivered packet must have crossed exactly two radio hops, via B.
    long long send0 = 0, fwd1 = 0, delivered = 0, other = 0;
    for (const auto& r : ctx.trace().records()) {
        if (r.ptype != PacketType::CbrData) continue;
        if (r.layer == TraceLayer::AGT && r.op == TraceOp::Receive && r.node == 2) ++delivered;
        if (r.layer != TraceLayer::RTR) continue;
        if (r.op == TraceOp::Send && r.node == 0) ++send0;
        else if (r.op == TraceOp::Forward && r.node == 1) ++fwd1;
        else if (r.op == TraceOp::Send || r.op == TraceOp::Forward) ++other;
    }
    if (other != 0 || send0 != m.sent || fwd1 != m.sent || delivered != m.sent) {
        detail = std::string(protocol_token(p)) + " hop pattern broken: send0=" +
                 std::to_string(send0) + " fwd1=" + std::to_string(fwd1) +
                 " other=" + std::to_string(other);
        return false;
    }
    detail = std::string(protocol_token(p)) + " pdr=1.0 hops=2";
    return true;
}

// --- C7 helpers: loop-freedom suites ---------------------------------------

bool aodv_snapshot_ok(RunContext& ctx, double now, std::string& err) {
    int n = ctx.config().n_nodes;
    for (NodeId i = 0; i < n; ++i) {
        const AodvAgent* a = ctx.aodv(i);
        for (const auto& [dst, e] : a->table()) {
            if (!e.valid || e.lifetime <= now) continue;
            if (e.next_hop == dst) continue;
            const AodvAgent* b = ctx.aodv(e.next_hop);
            auto it = b->table().find(dst);
            if (it == b->table().end()) continue;
            const AodvEntry& f = it->second;
            if (!f.valid || f.lifetime <= now) continue;
            if (std::make_pair(f.seqno, -f.hop_count) <= std::make_pair(e.seqno, -e.hop_count)) {
                std::ostringstream os;
                os << "t=" << now << " node " << i << "->" << dst << " via " << e.next_hop
                   << ": (" << e.seqno << "," << e.hop_count << ") not improved by ("
                   << f.seqno << "," << f.hop_count << ")";
                err = os.str();
                return false;
            }
        }
    }
    return true;
}

std::vector<std::vector<int>> bfs_distances(const std::vector<Vec2>& pos, double range) {
    std::size_t n = pos.size();
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
            if (dx * dx + dy * dy <= range * range) {
                adj[i].push_back(static_cast<int>(j));
                adj[j].push_back(static_cast<int>(i));
            }
        }
    }
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    for (std::size_t s = 0; s < n; ++s) {
        std::queue<int> q;
        dist[s][s] = 0;
        q.push(static_cast<int>(s));
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (dist[s][static_cast<std::size_t>(v)] == -1) {
                    dist[s][static_cast<std::size_t>(v)] = dist[s][static_cast<std::size_t>(u)] + 1;
                    q.push(v);
                }
            }
        }
    }
    return dist;
}

bool connected(const std::vector<std::vector<int>>& dist) {
    for (const auto& row : dist) {
        for (int d : row) {
            if (d < 0) return false;
        }
    }
    return true;
}

// One DSDV convergence check on a random connected topology: every table
// metric equals the BFS hop count and each next hop is one hop closer, which
// makes the next-hop graph acyclic.
bool dsdv_topology_ok(std::uint64_t seed, std::string& err) {
    RandomStream rng(seed);
    AreaBounds area{670.0, 670.0};
    int n = 10 + static_cast<int>(rng.uniform_int(21));  // 10..30 nodes

    std::vector<Vec2> pos(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> dist;
    for (int attempt = 0;; ++attempt) {
        for (auto& p : pos) p = Vec2{rng.uniform(0.0, area.width), rng.uniform(0.0, area.height)};
        dist = bfs_distances(pos, 250.0);
        if (connected(dist)) break;
        if (attempt > 200) {
            err = "could not draw a connected topology";
            return false;
        }
    }

    RunConfig cfg;
    cfg.protocol = Protocol::Dsdv;
    cfg.n_nodes = n;
    cfg.duration = 50.0;  // three full advertisement cycles plus jitter slack
    cfg.seed = seed;
    RunContext ctx(cfg, static_scenario(pos, area, cfg.duration), {});
    ctx.run();

    for (NodeId i = 0; i < n; ++i) {
        const auto& table = ctx.dsdv(i)->table();
        for (NodeId d = 0; d < n; ++d) {
            if (d == i) continue;
            auto it = table.find(d);
            int want = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
            if (it == table.end() || it->second.metric != want) {
                std::ostringstream os;
                os << "seed " << seed << ": node " << i << " metric to " << d << " is "
                   << (it == table.end() ? -1 : it->second.metric) << ", bfs says " << want;
                err = os.str();
                return false;
            }
            NodeId hop = it->second.next_hop;
            int hop_want = want - 1;
            int hop_have =
                hop == d ? 0 : dist[static_cast<std::size_t>(hop)][static_cast<std::size_t>(d)];
            if (hop_have != hop_want) {
                std::ostringstream os;
                os << "seed " << seed << ": node " << i << " next hop " << hop << " to " << d
                   << " is " << hop_have << " hops away, want " << hop_want;
                err = os.str();
                return false;
            }
        }
    }
    return true;
}

}  // namespace

int main() {
    int jobs = pool_jobs();
    std::printf("acceptance: %d worker threads\n", jobs);
    std::fflush(stdout);

    const int kSeeds = 20;
    const Protocol kProtocols[] = {Protocol::Dsdv, Protocol::Dsr, Protocol::Aodv};

    // Shared cells. A/B: the low-stress equivalence pair; C/D/E: the
    // 50-node, speed-50 trio for the ordering claims.
    CellKey cellA{Protocol::Dsdv, MobilityModel::RandomWalk, 0.0, 10, 10.0, 0.2};
    CellKey cellB{Protocol::Dsdv, MobilityModel::RandomWaypoint, 0.0, 10, 10.0, 0.2};
    CellKey cellC{Protocol::Dsdv, MobilityModel::RandomWalk, 0.0, 50, 50.0, 0.2};
    CellKey cellD{Protocol::Dsdv, MobilityModel::RandomWaypoint, 0.0, 50, 50.0, 0.2};
    CellKey cellE{Protocol::Dsdv, MobilityModel::RandomWaypoint, 25.0, 50, 50.0, 0.2};

    CellRuns A[3], B[3], C[3], D[3], E[3];

    auto t0 = std::chrono::steady_clock::now();
    for (int p = 0; p < 3; ++p) {
        CellKey ka = cellA, kb = cellB;
        ka.protocol = kb.protocol = kProtocols[p];
        A[p] = run_cell(ka, kSeeds, jobs);
        B[p] = run_cell(kb, kSeeds, jobs);
    }
    double c1_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (int p = 0; p < 3; ++p) {
        CellKey kc = cellC, kd = cellD, ke = cellE;
        kc.protocol = kd.protocol = ke.protocol = kProtocols[p];
        C[p] = run_cell(kc, kSeeds, jobs);
        D[p] = run_cell(kd, kSeeds, jobs);
        E[p] = run_cell(ke, kSeeds, jobs);
    }

    bool cells_ok = true;
    std::string cell_err;
    for (int p = 0; p < 3; ++p) {
        for (const CellRuns* c : {&A[p], &B[p], &C[p], &D[p], &E[p]}) {
            if (!c->errors.empty()) {
                cells_ok = false;
                cell_err = c->errors.front();
            }
        }
    }

    // C1: Random Walk vs zero-pause Random Waypoint at 10 nodes, speed 10.
    {
        bool pass = cells_ok && c1_secs < 300.0;
        std::string detail;
        for (int p = 0; p < 3; ++p) {
            double pa = mean_pdr(A[p]), pb = mean_pdr(B[p]);
            double ta = mean_tput(A[p]), tb = mean_tput(B[p]);
            double dp = std::fabs(pa - pb);
            double rel = std::fabs(ta - tb) / std::max(1e-12, 0.5 * (ta + tb));
            if (dp > 0.05 || rel > 0.10) pass = false;
            detail += std::string(protocol_token(kProtocols[p])) + " dPDR=" + fmt(dp) +
                      " dTput=" + fmt(rel) + "; ";
        }
        detail += "120 runs in " + fmt(c1_secs) + "s";
        if (!cells_ok) detail += "; run error: " + cell_err;
        report(1, pass, detail);
    }

    // C2: the walk/waypoint gap grows with pause time at 50 nodes, speed 50.
    {
        int grew = 0;
        std::string detail;
        for (int p = 0; p < 3; ++p) {
            double rw = mean_pdr(C[p]);
            double d0 = std::fabs(rw - mean_pdr(D[p]));
            double d25 = std::fabs(rw - mean_pdr(E[p]));
            if (d25 > d0) ++grew;
            detail += std::string(protocol_token(kProtocols[p])) + " gap0=" + fmt(d0) +
                      " gap25=" + fmt(d25) + "; ";
        }
        detail += std::to_string(grew) + "/3 grew";
        report(2, cells_ok && grew >= 2, detail);
    }

    // C3: reactive protocols out-deliver DSDV under stress (waypoint pause 0).
    {
        double dsdv = mean_pdr(D[0]), dsr = mean_pdr(D[1]), aodv = mean_pdr(D[2]);
        bool pass = cells_ok && dsr >= dsdv + 0.05 && aodv >= dsdv + 0.05;
        report(3, pass,
               "pdr dsdv=" + fmt(dsdv) + " dsr=" + fmt(dsr) + " aodv=" + fmt(aodv) +
                   " (margin 0.05)");
    }

    // C4: DSDV pays the most overhead in the low-traffic cell.
    {
        auto dsdv = mean_nro(A[0]), dsr = mean_nro(A[1]), aodv = mean_nro(A[2]);
        bool pass = cells_ok && dsdv && dsr && aodv && *dsdv > *dsr && *dsdv > *aodv;
        std::string detail = "nro dsdv=" + (dsdv ? fmt(*dsdv) : "NA") +
                             " dsr=" + (dsr ? fmt(*dsr) : "NA") +
                             " aodv=" + (aodv ? fmt(*aodv) : "NA");
        report(4, pass, detail);
    }

    // C5: DSDV trails on throughput, and the identity holds on every run.
    {
        double dsdv = mean_tput(D[0]), dsr = mean_tput(D[1]), aodv = mean_tput(D[2]);
        bool ordering = dsdv <= dsr && dsdv <= aodv;
        long long checked = 0, broken = 0;
        for (const CellRuns* group : {A, B, C, D, E}) {
            for (int p = 0; p < 3; ++p) {
                for (const RunMetrics& m : group[p].runs) {
                    ++checked;
                    bool ok = m.throughput == static_cast<double>(m.received) / 200.0 &&
                              std::llround(m.pdr * static_cast<double>(m.sent)) == m.received;
                    if (!ok) ++broken;
                }
            }
        }
        bool pass = cells_ok && ordering && broken == 0;
        report(5, pass,
               "tput dsdv=" + fmt(dsdv) + " dsr=" + fmt(dsr) + " aodv=" + fmt(aodv) +
                   "; identity held on " + std::to_string(checked - broken) + "/" +
                   std::to_string(checked) + " runs");
    }

    // C6: the hand-checkable chain.
    {
        bool pass = true;
        std::string detail;
        for (Protocol p : kProtocols) {
            std::string d;
            if (!chain_oracle(p, d)) pass = false;
            detail += d + "; ";
        }
        report(6, pass, detail);
    }

    // C7: loop-freedom at scale.
    {
        std::mutex mu;
        std::string first_err;
        std::atomic<int> bad{0};

        parallel_for(100, jobs, [&](std::size_t k) {
            RunConfig cfg;
            cfg.protocol = Protocol::Aodv;
            cfg.n_nodes = 50;
            cfg.duration = 200.0;
            cfg.mobility.model = k % 2 == 0 ? MobilityModel::RandomWalk
                                            : MobilityModel::RandomWaypoint;
            cfg.mobility.speed_max = k % 3 == 0 ? 10.0 : 50.0;
            cfg.mobility.pause_time =
                cfg.mobility.model == MobilityModel::RandomWaypoint && k % 4 == 1 ? 25.0 : 0.0;
            cfg.conn_fraction = k % 2 == 0 ? 0.2 : 0.6;
            cfg.seed = 1000 + 13 * static_cast<std::uint64_t>(k);
            try {
                RunContext ctx(cfg);
                for (int t = 1; t <= 200; ++t) {
                    ctx.run_to(static_cast<double>(t));
                    std::string err;
                    if (!aodv_snapshot_ok(ctx, static_cast<double>(t), err)) {
                        ++bad;
                        std::lock_guard<std::mutex> lock(mu);
                        if (first_err.empty()) first_err = "aodv run " + std::to_string(k) + " " + err;
                        return;
                    }
                }
            } catch (const std::exception& e) {
                ++bad;
                std::lock_guard<std::mutex> lock(mu);
                if (first_err.empty()) first_err = e.what();
            }
        });

        parallel_for(100, jobs, [&](std::size_t k) {
            std::string err;
            if (!dsdv_topology_ok(5000 + 7 * static_cast<std::uint64_t>(k), err)) {
                ++bad;
                std::lock_guard<std::mutex> lock(mu);
                if (first_err.empty()) first_err = "dsdv " + err;
            }
        });

        bool pass = bad.load() == 0;
        report(7, pass,
               pass ? "100 aodv snapshot runs + 100 dsdv topologies clean"
                    : "violations: " + std::to_string(bad.load()) + "; first: " + first_err);
    }

    // C8: determinism across executions and across job counts.
    {
        RunConfig cfg;
        cfg.protocol = Protocol::Aodv;
        cfg.n_nodes = 10;
        cfg.duration = 100.0;
        cfg.conn_fraction = 0.4;
        cfg.seed = 4242;

        std::ostringstream ta, tb;
        {
            RunContext ctx(cfg);
            ctx.run();
            write_trace(ctx.trace(), ta);
        }
        {
            RunContext ctx(cfg);
            ctx.run();
            write_trace(ctx.trace(), tb);
        }
        bool traces_equal = !ta.str().empty() && ta.str() == tb.str();

        MatrixSpec spec;
        spec.protocols = {Protocol::Aodv};
        spec.models = {MobilityModel::RandomWalk, MobilityModel::RandomWaypoint};
        spec.node_counts = {10};
        spec.speeds = {50.0};
        spec.fractions = {0.2};
        spec.seeds = 3;
        spec.duration = 100.0;
        MatrixResult serial = run_matrix(spec, 1);
        MatrixResult parallel = run_matrix(spec, 8);
        std::ostringstream ca, cb;
        write_results_csv(ca, serial.rows);
        write_results_csv(cb, parallel.rows);
        bool rows_equal = serial.failures.empty() && parallel.failures.empty() &&
                          ca.str() == cb.str();

        report(8, traces_equal && rows_equal,
               std::string("re-run traces ") + (traces_equal ? "identical" : "DIFFER") +
                   ", jobs 1 vs 8 results " + (rows_equal ? "identical" : "DIFFER"));
    }

    // C9: containment and direction uniformity.
    {
        long long samples = 0, clamped_out = 0, raw_out = 0;
        std::uint64_t k = 0;
        AreaBounds area{670.0, 670.0};
        while (samples < 1000000) {
            MobilityParams params;
            params.model = k % 2 == 0 ? MobilityModel::RandomWalk : MobilityModel::RandomWaypoint;
            params.speed_max = 50.0;
            params.pause_time = params.model == MobilityModel::RandomWaypoint && k % 4 == 1
                                    ? 25.0
                                    : 0.0;
            RandomStream rng(9000 + k);
            Scenario scen = generate_scenario(params, area, 20, 200.0, rng);
            for (const NodeTrack& track : scen.tracks) {
                for (const MobilityState& leg : track.legs) {
                    for (int s = 0; s <= 6; ++s) {
                        double t = leg.leg_start +
                                   (leg.leg_end - leg.leg_start) * (static_cast<double>(s) / 6.0);
                        t = std::min(t, leg.leg_end);
                        Vec2 raw = position_at(leg, t);
                        Vec2 pos = track.position_at(t, area);
                        ++samples;
                        if (pos.x < 0.0 || pos.x > area.width || pos.y < 0.0 ||
                            pos.y > area.height) {
                            ++clamped_out;
                        }
                        const double eps = 1e-9;
                        if (raw.x < -eps || raw.x > area.width + eps || raw.y < -eps ||
                            raw.y > area.height + eps) {
                            ++raw_out;
                        }
                    }
                }
            }
            ++k;
        }

        // Direction uniformity: fresh center starts so no wall ever clips the
        // first segment of the drawn leg.
        MobilityParams rw;
        rw.model = MobilityModel::RandomWalk;
        rw.speed_max = 10.0;
        RandomStream rng(424242);
        const int kBins = 36, kLegs = 100000;
        std::vector<long long> bins(kBins, 0);
        MobilityState center;
        center.leg_origin = Vec2{335.0, 335.0};
        center.leg_end = 0.0;
        for (int i = 0; i < kLegs; ++i) {
            auto legs = rw_next_leg(center, rw, area, rng);
            double theta = std::atan2(legs.front().velocity.y, legs.front().velocity.x);
            if (theta < 0) theta += 2.0 * 3.14159265358979323846;
            int bin = std::min(kBins - 1, static_cast<int>(theta / (2.0 * 3.14159265358979323846 /
                                                                    kBins)));
            ++bins[static_cast<std::size_t>(bin)];
        }
        double expected = static_cast<double>(kLegs) / kBins;
        double chi2 = 0.0;
        for (long long b : bins) {
            double d = static_cast<double>(b) - expected;
            chi2 += d * d / expected;
        }
        const double kCritical = 57.342;  // df 35, alpha 0.01

        bool pass = clamped_out == 0 && raw_out == 0 && chi2 < kCritical;
        report(9, pass,
               std::to_string(samples) + " positions, " + std::to_string(clamped_out) +
                   " out of area (raw excursions " + std::to_string(raw_out) +
                   "); chi2=" + fmt(chi2) + " < " + fmt(kCritical));
    }

    // C10: desk-scale runtime.
    {
        RunConfig cfg;
        cfg.protocol = Protocol::Aodv;
        cfg.n_nodes = 50;
        cfg.duration = 200.0;
        cfg.mobility.model = MobilityModel::RandomWaypoint;
        cfg.mobility.speed_max = 50.0;
        cfg.conn_fraction = 0.2;
        cfg.seed = 1;
        auto s0 = std::chrono::steady_clock::now();
        run_single(cfg);
        double single = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();

        MatrixSpec full;  // the default spec is the full 48-cell, 960-run matrix
        auto m0 = std::chrono::steady_clock::now();
        MatrixResult result = run_matrix(full, 8);
        double matrix = std::chrono::duration<double>(std::chrono::steady_clock::now() - m0).count();

        bool pass = single < 60.0 && matrix < 1800.0 && result.failures.empty() &&
                    result.rows.size() == 960;
        report(10, pass,
               "one 50-node run " + fmt(single) + "s (<60); 960-run matrix " + fmt(matrix) +
                   "s (<1800), " + std::to_string(result.rows.size()) + " rows, " +
                   std::to_string(result.failures.size()) + " failures");
    }

    std::printf("acceptance: %d of 10 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
