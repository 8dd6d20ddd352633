#ifndef MANETSIM_RUN_HPP
#define MANETSIM_RUN_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manetsim/aodv.hpp"
#include "manetsim/dsdv.hpp"
#include "manetsim/dsr.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/net_link.hpp"
#include "manetsim/routing.hpp"
#include "manetsim/traffic.hpp"

namespace manet {

enum class Protocol { Dsdv, Dsr, Aodv };

std::string_view protocol_token(Protocol p);                     // dsdv / dsr / aodv
std::optional<Protocol> parse_protocol(std::string_view s);
std::string_view mobility_token(MobilityModel m);                // rw / rwp
std::optional<MobilityModel> parse_mobility(std::string_view s);

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct RunConfig {
    Protocol protocol = Protocol::Dsdv;
    MobilityParams mobility;
    int n_nodes = 10;
    AreaBounds area{670.0, 670.0};
    double duration = 200.0;
    double conn_fraction = 0.2;
    std::uint64_t seed = 1;
    LinkModel link;
};

// Field-level validation; throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

// One wired simulation run. Owns the engine, scenario, traffic schedule,
// agents, and trace; tests drive it stepwise via run_to() and inspect agent
// tables between steps.
class RunContext {
  public:
    explicit RunContext(const RunConfig& cfg);
    // Same wiring over a caller-built scenario and traffic set (tests use
    // static topologies); scenario.tracks.size() must equal cfg.n_nodes.
    RunContext(const RunConfig& cfg, Scenario scenario, std::vector<CbrConnection> conns);

    void run();               // start (if needed) and run to cfg.duration
    void run_to(SimTime t);   // start (if needed) and run to t
    RunMetrics metrics() const { return compute_metrics(trace_, cfg_.duration); }

    Engine& engine() { return engine_; }
    Network& net() { return net_; }
    const TraceLog& trace() const { return trace_; }
    const Scenario& scenario() const { return scenario_; }
    const std::vector<CbrConnection>& connections() const { return conns_; }
    const RunConfig& config() const { return cfg_; }

    RoutingAgent& agent(NodeId n) { return *agents_.at(static_cast<std::size_t>(n)); }
    const DsdvAgent* dsdv(NodeId n) const;
    const DsrAgent* dsr(NodeId n) const;
    const AodvAgent* aodv(NodeId n) const;

  private:
    void start();
    void schedule_tick(std::size_t conn, long k);

    RunConfig cfg_;
    RandomStream jitter_rng_;
    Scenario scenario_;
    std::vector<CbrConnection> conns_;
    Engine engine_;
    TraceLog trace_;
    Network net_;
    SimServices services_;
    std::vector<std::unique_ptr<RoutingAgent>> agents_;
    bool started_ = false;
};

RunMetrics run_single(const RunConfig& cfg);
// Also writes the trace to trace_path (empty = skip).
RunMetrics run_single(const RunConfig& cfg, const std::string& trace_path);

// The experiment matrix: full cross product of the axes below; Random Walk
// cells always use pause 0, rwp_pause applies to Random Waypoint cells.
struct MatrixSpec {
    std::vector<Protocol> protocols{Protocol::Dsdv, Protocol::Dsr, Protocol::Aodv};
    std::vector<MobilityModel> models{MobilityModel::RandomWalk, MobilityModel::RandomWaypoint};
    std::vector<int> node_counts{10, 50};
    std::vector<double> speeds{10.0, 50.0};
    std::vector<double> fractions{0.2, 0.6};
    double rwp_pause = 25.0;
    double speed_min = 0.0;
    double leg_duration = 10.0;
    int seeds = 20;
    std::uint64_t seed_base = 1;
    AreaBounds area{670.0, 670.0};
    double duration = 200.0;
    LinkModel link;
};

std::size_t matrix_cell_count(const MatrixSpec& spec);
// Cells are numbered protocol-major: protocols, then models, then node
// counts, then speeds, then fractions. Seed = seed_base + cell*1009 + rep.
RunConfig cell_config(const MatrixSpec& spec, std::size_t cell, int replicate);

struct MatrixRow {
    Protocol protocol = Protocol::Dsdv;
    MobilityModel model = MobilityModel::RandomWalk;
    int nodes = 0;
    double speed_max = 0.0;
    double pause = 0.0;
    double conn_frac = 0.0;
    std::uint64_t seed = 0;
    RunMetrics m;
};

struct MatrixFailure {
    std::size_t cell = 0;
    int replicate = 0;
    std::string message;
};

struct MatrixResult {
    std::vector<MatrixRow> rows;          // in cell/replicate order
    std::vector<MatrixFailure> failures;  // runs that threw; others unaffected
};

MatrixResult run_matrix(const MatrixSpec& spec, int jobs);

struct CsvFormatError : std::runtime_error {
    explicit CsvFormatError(const std::string& what) : std::runtime_error(what) {}
};

extern const char* const kCsvHeader;
std::string csv_row(const MatrixRow& row);
MatrixRow parse_csv_row(const std::string& line);
void write_results_csv(std::ostream& out, const std::vector<MatrixRow>& rows);
std::vector<MatrixRow> read_results_csv(std::istream& in);

// Per-cell aggregation across seeds. nro aggregates defined values only.
struct CellSummary {
    Protocol protocol = Protocol::Dsdv;
    MobilityModel model = MobilityModel::RandomWalk;
    int nodes = 0;
    double speed_max = 0.0;
    double pause = 0.0;
    double conn_frac = 0.0;
    int runs = 0;
    Aggregate pdr;
    std::optional<Aggregate> nro;
    Aggregate throughput;
};

std::vector<CellSummary> summarize(const std::vector<MatrixRow>& rows);
void write_summary(std::ostream& out, const std::vector<CellSummary>& cells);

// One whitespace-separated file per (metric, model, speed, fraction):
// x = node count, one column per protocol (mean over seeds).
void write_plot_data(const std::string& dir, const std::vector<CellSummary>& cells);

}  // namespace manet

#endif
