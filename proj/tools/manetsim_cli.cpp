#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manetsim/run.hpp"

namespace {

using namespace manet;

struct CommonOpts {
    std::string protocol = "dsdv";
    std::string mobility = "rw";
    int nodes = 10;
    double speed_max = 10.0;
    double speed_min = 0.0;
    double pause = 0.0;
    double conn_frac = 0.2;
    std::uint64_t seed = 1;
    double duration = 200.0;
    double area = 670.0;
    double range = 250.0;
    double leg_duration = 10.0;
    double hop_latency = 0.002;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_protocol) {
    if (with_protocol) {
        cmd->add_option("--protocol", o.protocol, "dsdv, dsr, or aodv")
            ->check(CLI::IsMember({"dsdv", "dsr", "aodv"}));
    }
    cmd->add_option("--mobility", o.mobility, "rw or rwp")
        ->check(CLI::IsMember({"rw", "rwp"}));
    cmd->add_option("--nodes", o.nodes, "number of nodes");
    cmd->add_option("--speed-max", o.speed_max, "maximum node speed (m/s)");
    cmd->add_option("--speed-min", o.speed_min, "minimum node speed (m/s)");
    cmd->add_option("--pause", o.pause, "waypoint pause time (s)");
    cmd->add_option("--conn-frac", o.conn_frac, "CBR connections as a fraction of nodes");
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--duration", o.duration, "simulated seconds");
    cmd->add_option("--area", o.area, "square area side (m)");
    cmd->add_option("--range", o.range, "radio range (m)");
    cmd->add_option("--leg-duration", o.leg_duration, "random-walk leg length (s)");
    cmd->add_option("--hop-latency", o.hop_latency, "per-hop delivery latency (s)");
}

RunConfig to_config(const CommonOpts& o) {
    RunConfig cfg;
    cfg.protocol = parse_protocol(o.protocol).value_or(Protocol::Dsdv);
    cfg.mobility.model = parse_mobility(o.mobility).value_or(MobilityModel::RandomWalk);
    cfg.mobility.speed_min = o.speed_min;
    cfg.mobility.speed_max = o.speed_max;
    cfg.mobility.pause_time = o.pause;
    cfg.mobility.leg_duration = o.leg_duration;
    cfg.n_nodes = o.nodes;
    cfg.area = AreaBounds{o.area, o.area};
    cfg.duration = o.duration;
    cfg.conn_fraction = o.conn_frac;
    cfg.seed = o.seed;
    cfg.link.range = o.range;
    cfg.link.hop_latency = o.hop_latency;
    return cfg;
}

int cmd_run(const CommonOpts& o, const std::string& out, const std::string& trace_path) {
    RunConfig cfg = to_config(o);
    RunMetrics m = run_single(cfg, trace_path);

    MatrixRow row{cfg.protocol,      cfg.mobility.model, cfg.n_nodes, cfg.mobility.speed_max,
                  cfg.mobility.pause_time, cfg.conn_fraction,  cfg.seed,    m};
    std::printf("sent %lld received %lld routing_tx %lld\n", m.sent, m.received, m.routing_tx);
    std::printf("pdr %.6f\n", m.pdr);
    if (m.nro) {
        std::printf("nro %.6f\n", *m.nro);
    } else {
        std::printf("nro NA\n");
    }
    std::printf("throughput %.6f pkt/s\n", m.throughput);

    if (!out.empty()) {
        bool fresh = !std::ifstream(out).good();
        std::ofstream f(out, std::ios::app);
        if (!f) {
            std::cerr << "cannot open " << out << "\n";
            return 1;
        }
        if (fresh) f << kCsvHeader << '\n';
        f << csv_row(row) << '\n';
    }
    return 0;
}

int cmd_matrix(const MatrixSpec& spec, int jobs, const std::string& out,
               const std::string& plot_dir, bool quiet) {
    MatrixResult result = run_matrix(spec, jobs);

    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot open " << out << "\n";
            return 1;
        }
        write_results_csv(f, result.rows);
    } else {
        write_results_csv(std::cout, result.rows);
    }

    auto cells = summarize(result.rows);
    if (!quiet) write_summary(std::cout, cells);
    if (!plot_dir.empty()) write_plot_data(plot_dir, cells);

    if (!result.failures.empty()) {
        for (const auto& fail : result.failures) {
            RunConfig cfg = cell_config(spec, fail.cell, fail.replicate);
            std::cerr << "cell " << fail.cell << " rep " << fail.replicate << " ("
                      << protocol_token(cfg.protocol) << " " << mobility_token(cfg.mobility.model)
                      << " n=" << cfg.n_nodes << " v=" << cfg.mobility.speed_max
                      << " f=" << cfg.conn_fraction << " seed=" << cfg.seed
                      << "): " << fail.message << "\n";
        }
        std::cerr << result.failures.size() << " run(s) failed\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MANET routing simulator: DSDV / DSR / AODV over random mobility"};
    app.set_config("--config", "", "flat key = value config file; flags override");
    app.require_subcommand(1);

    CommonOpts run_opts;
    std::string run_out, run_trace;
    CLI::App* run_cmd = app.add_subcommand("run", "execute one simulation run");
    add_common_flags(run_cmd, run_opts, true);
    run_cmd->add_option("--out", run_out, "append a CSV result row to this file");
    run_cmd->add_option("--trace", run_trace, "write the event trace to this file");

    MatrixSpec spec;
    std::vector<std::string> m_protocols{"dsdv", "dsr", "aodv"};
    std::vector<std::string> m_models{"rw", "rwp"};
    int m_jobs = 1;
    std::string m_out, m_plot;
    bool m_quiet = false;
    CLI::App* matrix_cmd = app.add_subcommand("matrix", "run the full experiment matrix");
    matrix_cmd->add_option("--protocols", m_protocols, "protocol axis")->delimiter(',');
    matrix_cmd->add_option("--mobilities", m_models, "mobility axis")->delimiter(',');
    matrix_cmd->add_option("--nodes", spec.node_counts, "node-count axis")->delimiter(',');
    matrix_cmd->add_option("--speeds", spec.speeds, "speed axis (m/s)")->delimiter(',');
    matrix_cmd->add_option("--fracs", spec.fractions, "connection-fraction axis")->delimiter(',');
    matrix_cmd->add_option("--pause", spec.rwp_pause, "pause time for rwp cells (s)");
    matrix_cmd->add_option("--speed-min", spec.speed_min, "minimum node speed (m/s)");
    matrix_cmd->add_option("--seeds", spec.seeds, "replicates per cell");
    matrix_cmd->add_option("--seed-base", spec.seed_base, "base seed");
    matrix_cmd->add_option("--duration", spec.duration, "simulated seconds");
    double m_area = 670.0;
    matrix_cmd->add_option("--area", m_area, "square area side (m)");
    matrix_cmd->add_option("--range", spec.link.range, "radio range (m)");
    matrix_cmd->add_option("--jobs", m_jobs, "concurrent runs");
    matrix_cmd->add_option("--out", m_out, "results CSV path (default stdout)");
    matrix_cmd->add_option("--plot-data", m_plot, "directory for gnuplot-ready .dat files");
    matrix_cmd->add_flag("--quiet", m_quiet, "skip the summary table");

    CommonOpts scen_opts;
    std::string scen_out = "scenario.txt";
    CLI::App* scen_cmd = app.add_subcommand("gen-scenario", "generate a mobility scenario file");
    add_common_flags(scen_cmd, scen_opts, false);
    scen_cmd->add_option("--out", scen_out, "scenario file path");

    CommonOpts cbr_opts;
    std::string cbr_out = "cbr.txt";
    CLI::App* cbr_cmd = app.add_subcommand("gen-cbr", "generate a CBR connection file");
    cbr_cmd->add_option("--nodes", cbr_opts.nodes, "number of nodes");
    cbr_cmd->add_option("--conn-frac", cbr_opts.conn_frac, "connections as a fraction of nodes");
    cbr_cmd->add_option("--seed", cbr_opts.seed, "generator seed");
    cbr_cmd->add_option("--out", cbr_out, "connection file path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts, run_out, run_trace);

        if (matrix_cmd->parsed()) {
            spec.protocols.clear();
            for (const auto& s : m_protocols) {
                auto p = parse_protocol(s);
                if (!p) {
                    std::cerr << "unknown protocol: " << s << "\n";
                    return 2;
                }
                spec.protocols.push_back(*p);
            }
            spec.models.clear();
            for (const auto& s : m_models) {
                auto m = parse_mobility(s);
                if (!m) {
                    std::cerr << "unknown mobility model: " << s << "\n";
                    return 2;
                }
                spec.models.push_back(*m);
            }
            spec.area = manet::AreaBounds{m_area, m_area};
            return cmd_matrix(spec, m_jobs, m_out, m_plot, m_quiet);
        }

        if (scen_cmd->parsed()) {
            RunConfig cfg = to_config(scen_opts);
            validate(cfg);
            RandomStream rng(cfg.seed ^ seed_tag::kScenario);
            Scenario scen =
                generate_scenario(cfg.mobility, cfg.area, cfg.n_nodes, cfg.duration, rng);
            std::ofstream f(scen_out);
            if (!f) {
                std::cerr << "cannot open " << scen_out << "\n";
                return 1;
            }
            write_scenario(scen, f);
            return 0;
        }

        if (cbr_cmd->parsed()) {
            RandomStream rng(cbr_opts.seed ^ seed_tag::kTraffic);
            auto conns = generate_connections(cbr_opts.nodes, cbr_opts.conn_frac, rng);
            std::ofstream f(cbr_out);
            if (!f) {
                std::cerr << "cannot open " << cbr_out << "\n";
                return 1;
            }
            write_connections(conns, f);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
