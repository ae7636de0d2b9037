// Command-line front end: graph/ensemble generation, Monte Carlo simulation,
// parameter sweeps, analytic load tables, joint scheme comparison, offline
// decoding, and the concordance renderer.
//
// Exit codes: 0 success, 2 invalid configuration, 3 failed --assert check,
// 1 anything else.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qnclab/bounds.hpp"
#include "qnclab/concordance.hpp"
#include "qnclab/decode.hpp"
#include "qnclab/errors.hpp"
#include "qnclab/harness.hpp"
#include "qnclab/textio.hpp"

using namespace qnclab;

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file " + path);
    return out;
}

void write_or_print(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out = open_output(path);
    out << text;
    if (!out.good()) throw IoError("write failed for " + path);
}

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::optional<double> assert_distortion;
    bool no_timing = false;
};

void add_config_flags(CLI::App* cmd, ExperimentConfig& config, std::string& scheme,
                      std::string& transform, std::string& law, std::string& forwarding,
                      std::string& decoder, std::string& reconstruction) {
    cmd->add_option("--scheme", scheme, "qpf | qnc-network | qnc-idealized");
    cmd->add_option("--nodes", config.node_count, "number of nodes n");
    cmd->add_option("--edges", config.edge_count, "number of directed edges |E|");
    cmd->add_option("--capacity", config.capacity, "bits per channel use C0");
    cmd->add_option("--gateway", config.gateway, "gateway node id (default n-1)");
    cmd->add_option("--sparsity", config.sparsity, "transform-domain sparsity k");
    cmd->add_option("--q-max", config.q_max, "message amplitude bound");
    cmd->add_option("--transform", transform, "identity | discrete-cosine | random-orthonormal");
    cmd->add_option("--transform-seed", config.transform_seed, "seed for the random transform");
    cmd->add_option("--law", law, "nonzero coefficient law: uniform | gaussian | rademacher");
    cmd->add_option("--packet-length", config.packet_length, "packet length L");
    cmd->add_option("--reconstruction", reconstruction, "lower-edge | midpoint");
    cmd->add_option("--forwarding", forwarding, "bernoulli | exact");
    cmd->add_option("--forward-prob", config.forwarding.probability,
                    "forwarding probability (bernoulli)");
    cmd->add_option("--forward-count", config.forwarding.count, "forwarder count (exact)");
    cmd->add_option("--decoder", decoder, "median-of-means | ist");
    cmd->add_option("--m1", config.block_size, "decoder block size");
    cmd->add_option("--m2", config.block_count, "decoder block count");
    cmd->add_option("--epsilon", config.epsilon, "accuracy target for sizing");
    cmd->add_option("--gamma", config.gamma, "confidence exponent for sizing");
    cmd->add_option("--kappa", config.kappa_override,
                    "coefficient magnitude (0: derive from n and |E|)");
    cmd->add_flag("--even-median", [&config](std::int64_t) { config.strict_median = false; },
                  "allow even block counts (average the central pair)");
}

ExperimentConfig finalize_config(const CommonOptions& common, ExperimentConfig config,
                                 const std::string& scheme, const std::string& transform,
                                 const std::string& law, const std::string& forwarding,
                                 const std::string& decoder,
                                 const std::string& reconstruction) {
    if (!common.config_path.empty()) {
        config = load_config_file(common.config_path);
    } else {
        config.scheme = scheme_from_name(scheme);
        config.transform_kind = transform_kind_from_name(transform);
        config.coefficient_law = coefficient_law_from_name(law);
        config.decoder = decoder_from_name(decoder);
        if (forwarding == "bernoulli") {
            config.forwarding.kind = ForwardingMode::Kind::Bernoulli;
        } else if (forwarding == "exact") {
            config.forwarding.kind = ForwardingMode::Kind::Exact;
        } else {
            throw InvalidConfigError("unknown forwarding mode: " + forwarding);
        }
        if (reconstruction == "lower-edge") {
            config.reconstruction = ReconstructionRule::LowerEdge;
        } else if (reconstruction == "midpoint") {
            config.reconstruction = ReconstructionRule::Midpoint;
        } else {
            throw InvalidConfigError("unknown reconstruction rule: " + reconstruction);
        }
    }
    if (common.seed) config.master_seed = *common.seed;
    if (common.trials) config.trials = *common.trials;
    if (common.threads) config.threads = *common.threads;
    if (common.no_timing) config.record_timing = false;
    if (!common.out_path.empty()) config.output_path = common.out_path;
    validate(config);
    return config;
}

int emit_records(const std::vector<ExperimentRecord>& records, const CommonOptions& common) {
    if (common.out_path.empty()) {
        if (common.format == "csv") {
            emit_csv(records, std::cout);
        } else {
            emit_jsonl(records, std::cout);
        }
    } else {
        emit_to_file(records, common.out_path, common.format);
    }
    if (common.assert_distortion) {
        for (const ExperimentRecord& record : records) {
            if (record.distortion_max > *common.assert_distortion) {
                std::cerr << "assert failed: distortion " << record.distortion_max << " > "
                          << *common.assert_distortion << "\n";
                return 3;
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation lab for quantized network coding versus packet forwarding"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--config", common.config_path, "JSON experiment config file");
    app.add_option("--out", common.out_path, "output file (default: stdout)");
    app.add_option("--format", common.format, "csv | json-lines");
    app.add_option("--seed", common.seed, "master seed override");
    app.add_option("--trials", common.trials, "trial count override");
    app.add_option("--threads", common.threads, "worker thread count (0 = default)");
    app.add_option("--assert", common.assert_distortion,
                   "exit 3 unless max distortion stays at or below this value");
    app.add_flag("--no-timing", common.no_timing, "zero the wall_ms column for stable bytes");

    // ---- generate ----
    CLI::App* generate = app.add_subcommand("generate", "write a graph or ensemble to a file");
    CLI::App* gen_graph = generate->add_subcommand("graph", "random directed multigraph");
    int gg_nodes = 10;
    int gg_edges = 30;
    double gg_capacity = 1.0;
    int gg_gateway = -1;
    std::uint64_t gg_seed = 0;
    gen_graph->add_option("--nodes", gg_nodes);
    gen_graph->add_option("--edges", gg_edges);
    gen_graph->add_option("--capacity", gg_capacity);
    gen_graph->add_option("--gateway", gg_gateway);
    gen_graph->add_option("--graph-seed", gg_seed);

    CLI::App* gen_ensemble = generate->add_subcommand("ensemble", "sparse message ensemble");
    int ge_nodes = 10;
    int ge_sparsity = 2;
    double ge_qmax = 1.0;
    std::string ge_transform = "discrete-cosine";
    std::uint64_t ge_tseed = 0;
    std::string ge_law = "uniform";
    std::uint64_t ge_seed = 0;
    gen_ensemble->add_option("--nodes", ge_nodes);
    gen_ensemble->add_option("--sparsity", ge_sparsity);
    gen_ensemble->add_option("--q-max", ge_qmax);
    gen_ensemble->add_option("--transform", ge_transform);
    gen_ensemble->add_option("--transform-seed", ge_tseed);
    gen_ensemble->add_option("--law", ge_law);
    gen_ensemble->add_option("--ensemble-seed", ge_seed);

    // ---- simulate ----
    CLI::App* simulate = app.add_subcommand("simulate", "run one experiment configuration");
    ExperimentConfig sim_config;
    std::string sim_scheme = "qpf";
    std::string sim_transform = "discrete-cosine";
    std::string sim_law = "uniform";
    std::string sim_forwarding = "bernoulli";
    std::string sim_decoder = "median-of-means";
    std::string sim_reconstruction = "lower-edge";
    add_config_flags(simulate, sim_config, sim_scheme, sim_transform, sim_law, sim_forwarding,
                     sim_decoder, sim_reconstruction);

    // ---- sweep ----
    CLI::App* sweep = app.add_subcommand("sweep", "vary one parameter over a list");
    ExperimentConfig sweep_config;
    std::string sweep_scheme = "qpf";
    std::string sweep_transform = "discrete-cosine";
    std::string sweep_law = "uniform";
    std::string sweep_forwarding = "bernoulli";
    std::string sweep_decoder = "median-of-means";
    std::string sweep_reconstruction = "lower-edge";
    std::string sweep_param;
    std::vector<std::string> sweep_values;
    add_config_flags(sweep, sweep_config, sweep_scheme, sweep_transform, sweep_law,
                     sweep_forwarding, sweep_decoder, sweep_reconstruction);
    sweep->add_option("--param", sweep_param,
                      "nodes | edges | sparsity | packet-length | forward-count | q-max")
        ->required();
    sweep->add_option("--values", sweep_values, "comma-separated list")
        ->required()
        ->delimiter(',');

    // ---- bounds ----
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "analytic load comparison table");
    LoadBoundInputs bound_inputs;
    std::vector<long long> bound_ns = {100, 1000, 10000, 100000, 1000000};
    bounds_cmd->add_option("--nodes-list", bound_ns, "node counts")->delimiter(',');
    bounds_cmd->add_option("--sparsity", bound_inputs.sparsity);
    bounds_cmd->add_option("--q-max", bound_inputs.q_max);
    bounds_cmd->add_option("--q-prime-max", bound_inputs.q_prime_max);
    bounds_cmd->add_option("--kappa", bound_inputs.kappa);
    bounds_cmd->add_option("--capacity", bound_inputs.capacity);
    bounds_cmd->add_option("--distortion", bound_inputs.target_distortion)->required();
    bounds_cmd->add_flag("--log2", bound_inputs.log_base2, "use base-2 logarithms");
    bounds_cmd->add_option("--edges-per-node", bound_inputs.edges_per_node,
                           "rederive kappa per row from |E| = r*n instead of keeping it fixed");

    // ---- compare ----
    CLI::App* compare = app.add_subcommand(
        "compare", "run the forwarding baseline and the coded scheme on shared parameters");
    ExperimentConfig cmp_config;
    std::string cmp_scheme = "qnc-network"; // the coded side of the comparison
    std::string cmp_transform = "discrete-cosine";
    std::string cmp_law = "uniform";
    std::string cmp_forwarding = "bernoulli";
    std::string cmp_decoder = "median-of-means";
    std::string cmp_reconstruction = "lower-edge";
    add_config_flags(compare, cmp_config, cmp_scheme, cmp_transform, cmp_law, cmp_forwarding,
                     cmp_decoder, cmp_reconstruction);

    // ---- decode ----
    CLI::App* decode_cmd =
        app.add_subcommand("decode", "offline decode of an exported measurement system");
    std::string dec_measurement;
    std::string dec_truth;
    int dec_m1 = 1;
    int dec_m2 = 1;
    double dec_qmax = 1.0;
    bool dec_even = false;
    decode_cmd->add_option("--measurement", dec_measurement, "measurement CSV")->required();
    decode_cmd->add_option("--truth", dec_truth, "ensemble CSV with the true messages");
    decode_cmd->add_option("--m1", dec_m1, "block size")->required();
    decode_cmd->add_option("--m2", dec_m2, "block count")->required();
    decode_cmd->add_option("--q-max", dec_qmax, "clipping bound");
    decode_cmd->add_flag("--even-median", dec_even, "allow an even block count");

    // ---- concordance ----
    CLI::App* concordance_cmd =
        app.add_subcommand("concordance", "render the claim-to-code concordance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // help/version exit cleanly, bad usage is config error
    }

    try {
        if (generate->parsed()) {
            if (gen_graph->parsed()) {
                const int gateway = gg_gateway < 0 ? gg_nodes - 1 : gg_gateway;
                const NetworkGraph graph =
                    generate_network(gg_nodes, gg_edges, gg_capacity, gateway, gg_seed);
                std::ostringstream text;
                write_graph(graph, text);
                write_or_print(text.str(), common.out_path);
            } else if (gen_ensemble->parsed()) {
                const Transform transform = make_transform(
                    ge_nodes, transform_kind_from_name(ge_transform), ge_tseed);
                const MessageEnsemble ensemble =
                    sample_messages(ge_nodes, ge_sparsity, ge_qmax, transform,
                                    common.seed.value_or(ge_seed),
                                    coefficient_law_from_name(ge_law));
                std::ostringstream text;
                write_ensemble_csv(ensemble, text);
                write_or_print(text.str(), common.out_path);
            } else {
                std::cerr << "generate needs a 'graph' or 'ensemble' subcommand\n";
                return 2;
            }
            return 0;
        }

        if (simulate->parsed()) {
            const ExperimentConfig config =
                finalize_config(common, sim_config, sim_scheme, sim_transform, sim_law,
                                sim_forwarding, sim_decoder, sim_reconstruction);
            return emit_records({run_trials(config)}, common);
        }

        if (sweep->parsed()) {
            ExperimentConfig base =
                finalize_config(common, sweep_config, sweep_scheme, sweep_transform, sweep_law,
                                sweep_forwarding, sweep_decoder, sweep_reconstruction);
            std::vector<ExperimentRecord> records;
            for (const std::string& value : sweep_values) {
                ExperimentConfig config = base;
                if (sweep_param == "nodes") {
                    config.node_count = std::stoi(value);
                } else if (sweep_param == "edges") {
                    config.edge_count = std::stoi(value);
                } else if (sweep_param == "sparsity") {
                    config.sparsity = std::stoi(value);
                } else if (sweep_param == "packet-length") {
                    config.packet_length = std::stoi(value);
                } else if (sweep_param == "forward-count") {
                    config.forwarding.count = std::stoi(value);
                } else if (sweep_param == "q-max") {
                    config.q_max = parse_double(value);
                } else {
                    throw InvalidConfigError("unknown sweep parameter: " + sweep_param);
                }
                validate(config);
                records.push_back(run_trials(config));
            }
            return emit_records(records, common);
        }

        if (bounds_cmd->parsed()) {
            std::ostringstream text;
            write_load_table_csv(compare_loads(bound_ns, bound_inputs), text);
            write_or_print(text.str(), common.out_path);
            return 0;
        }

        if (compare->parsed()) {
            ExperimentConfig coded =
                finalize_config(common, cmp_config, cmp_scheme, cmp_transform, cmp_law,
                                cmp_forwarding, cmp_decoder, cmp_reconstruction);
            if (coded.scheme == Scheme::Qpf) {
                throw InvalidConfigError("compare: --scheme picks the coded side, not qpf");
            }
            ExperimentConfig baseline = coded;
            baseline.scheme = Scheme::Qpf;
            validate(baseline);
            return emit_records({run_trials(baseline), run_trials(coded)}, common);
        }

        if (decode_cmd->parsed()) {
            std::ifstream in(dec_measurement);
            if (!in) throw IoError("cannot open measurement file " + dec_measurement);
            const MeasurementSystem system = read_measurement_csv(in);
            MedianDecoderParams params;
            params.block_size = dec_m1;
            params.block_count = dec_m2;
            params.q_max = dec_qmax;
            params.strict_median = !dec_even;
            Eigen::VectorXd truth;
            const Eigen::VectorXd* truth_ptr = nullptr;
            if (!dec_truth.empty()) {
                std::ifstream truth_in(dec_truth);
                if (!truth_in) throw IoError("cannot open ensemble file " + dec_truth);
                truth = read_ensemble_csv(truth_in).messages;
                truth_ptr = &truth;
            }
            const DecoderReport report =
                median_of_means_decode(system.received, system.psi, params, truth_ptr);
            std::ostringstream text;
            text << "# decoded m1=" << params.block_size << " m2=" << params.block_count
                 << " dropped=" << report.dropped_rows << " clipped=" << report.clip_count
                 << '\n';
            text << (truth_ptr ? "v,x_hat,abs_error\n" : "v,x_hat\n");
            for (Eigen::Index v = 0; v < report.estimate.size(); ++v) {
                text << v << ',' << format_double(report.estimate(v));
                if (truth_ptr) text << ',' << format_double(report.per_coord_abs_error(v));
                text << '\n';
            }
            write_or_print(text.str(), common.out_path);
            return 0;
        }

        if (concordance_cmd->parsed()) {
            write_or_print(render_concordance(), common.out_path);
            return 0;
        }
    } catch (const InvalidConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
