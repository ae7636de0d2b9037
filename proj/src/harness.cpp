#include "qnclab/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "qnclab/bounds.hpp"
#include "qnclab/decode.hpp"
#include "qnclab/errors.hpp"
#include "qnclab/qpf.hpp"
#include "qnclab/rng.hpp"
#include "qnclab/textio.hpp"

namespace qnclab {

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
    case Scheme::Qpf: return "qpf";
    case Scheme::QncNetwork: return "qnc-network";
    case Scheme::QncIdealized: return "qnc-idealized";
    }
    return "qpf";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "qpf") return Scheme::Qpf;
    if (name == "qnc-network") return Scheme::QncNetwork;
    if (name == "qnc-idealized") return Scheme::QncIdealized;
    throw InvalidConfigError("unknown scheme: " + name);
}

std::string decoder_name(DecoderChoice decoder) {
    switch (decoder) {
    case DecoderChoice::MedianOfMeans: return "median-of-means";
    case DecoderChoice::Ist: return "ist";
    }
    return "median-of-means";
}

DecoderChoice decoder_from_name(const std::string& name) {
    if (name == "median-of-means" || name == "median") return DecoderChoice::MedianOfMeans;
    if (name == "ist") return DecoderChoice::Ist;
    throw InvalidConfigError("unknown decoder: " + name);
}

int resolved_gateway(const ExperimentConfig& config) {
    return config.gateway < 0 ? config.node_count - 1 : config.gateway;
}

void validate(const ExperimentConfig& config) {
    if (config.node_count < 2) throw InvalidConfigError("config: node_count must be >= 2");
    if (config.edge_count < 0) throw InvalidConfigError("config: edge_count must be >= 0");
    if (config.capacity <= 0.0) throw InvalidConfigError("config: capacity must be positive");
    const int gw = resolved_gateway(config);
    if (gw < 0 || gw >= config.node_count) throw InvalidConfigError("config: gateway out of range");
    if (config.sparsity < 0 || config.sparsity > config.node_count) {
        throw InvalidConfigError("config: sparsity outside 0..n");
    }
    if (config.q_max <= 0.0) throw InvalidConfigError("config: q_max must be positive");
    if (config.trials < 1) throw InvalidConfigError("config: trials must be >= 1");
    // quantizer constructability (throws on L*C0 < 1)
    make_quantizer(config.q_max, config.packet_length, config.capacity, config.reconstruction);
    if (config.scheme != Scheme::Qpf) {
        if (config.forwarding.kind == ForwardingMode::Kind::Bernoulli) {
            if (config.forwarding.probability < 0.0 || config.forwarding.probability > 1.0) {
                throw InvalidConfigError("config: forwarding probability outside [0,1]");
            }
        } else if (config.forwarding.count < 0 || config.forwarding.count > config.node_count) {
            throw InvalidConfigError("config: forwarding count outside 0..n");
        }
        const bool explicit_blocks = config.block_size > 0 && config.block_count > 0;
        const bool derived_blocks = config.epsilon > 0.0 && config.gamma > 0.0;
        if (config.decoder == DecoderChoice::MedianOfMeans && !explicit_blocks && !derived_blocks) {
            throw InvalidConfigError(
                "config: median decoder needs either block_size/block_count or epsilon/gamma");
        }
        if (config.strict_median && explicit_blocks && config.block_count % 2 == 0) {
            throw InvalidConfigError("config: strict median needs an odd block_count");
        }
        if (config.kappa_override != 0.0 && config.kappa_override < 1.0) {
            throw InvalidConfigError("config: kappa override must be >= 1");
        }
    }
    if (config.threads < 0) throw InvalidConfigError("config: threads must be >= 0");
}

std::string config_to_text(const ExperimentConfig& c) {
    nlohmann::json j;
    j["scheme"] = scheme_name(c.scheme);
    j["node_count"] = c.node_count;
    j["edge_count"] = c.edge_count;
    j["capacity"] = c.capacity;
    j["gateway"] = c.gateway;
    j["sparsity"] = c.sparsity;
    j["q_max"] = c.q_max;
    j["transform"] = transform_kind_name(c.transform_kind);
    j["transform_seed"] = c.transform_seed;
    j["coefficient_law"] = coefficient_law_name(c.coefficient_law);
    j["packet_length"] = c.packet_length;
    j["reconstruction"] = c.reconstruction == ReconstructionRule::LowerEdge ? "lower-edge"
                                                                            : "midpoint";
    j["forwarding_mode"] =
        c.forwarding.kind == ForwardingMode::Kind::Bernoulli ? "bernoulli" : "exact";
    j["forwarding_probability"] = c.forwarding.probability;
    j["forwarding_count"] = c.forwarding.count;
    j["decoder"] = decoder_name(c.decoder);
    j["block_size"] = c.block_size;
    j["block_count"] = c.block_count;
    j["epsilon"] = c.epsilon;
    j["gamma"] = c.gamma;
    j["kappa_override"] = c.kappa_override;
    j["strict_median"] = c.strict_median;
    j["trials"] = c.trials;
    j["master_seed"] = c.master_seed;
    j["threads"] = c.threads;
    j["record_timing"] = c.record_timing;
    j["output_path"] = c.output_path;
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfigError(std::string("config: bad JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.scheme = scheme_from_name(j.at("scheme").get<std::string>());
        c.node_count = j.at("node_count").get<int>();
        c.edge_count = j.at("edge_count").get<int>();
        c.capacity = j.at("capacity").get<double>();
        c.gateway = j.value("gateway", -1);
        c.sparsity = j.at("sparsity").get<int>();
        c.q_max = j.at("q_max").get<double>();
        c.transform_kind = transform_kind_from_name(j.value("transform", "identity"));
        c.transform_seed = j.value("transform_seed", std::uint64_t{0});
        c.coefficient_law = coefficient_law_from_name(j.value("coefficient_law", "uniform"));
        c.packet_length = j.at("packet_length").get<int>();
        c.reconstruction = j.value("reconstruction", "lower-edge") == std::string("midpoint")
                               ? ReconstructionRule::Midpoint
                               : ReconstructionRule::LowerEdge;
        const std::string fwd = j.value("forwarding_mode", "bernoulli");
        if (fwd == "bernoulli") {
            c.forwarding = ForwardingMode::bernoulli(j.value("forwarding_probability", 1.0));
        } else if (fwd == "exact") {
            c.forwarding = ForwardingMode::exact(j.value("forwarding_count", 0));
        } else {
            throw InvalidConfigError("config: unknown forwarding mode " + fwd);
        }
        c.decoder = decoder_from_name(j.value("decoder", "median-of-means"));
        c.block_size = j.value("block_size", 0);
        c.block_count = j.value("block_count", 0);
        c.epsilon = j.value("epsilon", 0.0);
        c.gamma = j.value("gamma", 0.0);
        c.kappa_override = j.value("kappa_override", 0.0);
        c.strict_median = j.value("strict_median", true);
        c.trials = j.at("trials").get<int>();
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
        c.threads = j.value("threads", 0);
        c.record_timing = j.value("record_timing", true);
        c.output_path = j.value("output_path", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfigError(std::string("config: missing or mistyped field: ") + e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_text(buffer.str());
}

namespace {

struct TrialOutcome {
    bool completed = false;
    std::string abort_message;
    std::vector<double> abs_error;
    double load = 0.0;
    double q_prime = 0.0;
    long long rows = 0;
    int block_size = 0;
    int block_count = 0;
    long long clips = 0;
    long long violations = 0;
};

TrialOutcome run_one_trial(const ExperimentConfig& config, const Transform& transform,
                           std::uint64_t trial_seed) {
    TrialOutcome outcome;
    const int n = config.node_count;
    const QuantizerSpec quantizer =
        make_quantizer(config.q_max, config.packet_length, config.capacity,
                       config.reconstruction);

    const MessageEnsemble ensemble =
        sample_messages(n, config.sparsity, config.q_max, transform,
                        role_seed(trial_seed, SeedRole::Sources), config.coefficient_law);
    outcome.q_prime = ensemble.q_prime_max;

    switch (config.scheme) {
    case Scheme::Qpf: {
        const NetworkGraph graph =
            generate_network(n, config.edge_count, config.capacity, resolved_gateway(config),
                             role_seed(trial_seed, SeedRole::Graph));
        const QpfResult result = simulate_qpf(graph, ensemble, config.packet_length);
        outcome.abs_error = result.per_node_abs_error;
        outcome.load = static_cast<double>(result.delivered_load);
        outcome.rows = n - 1;
        break;
    }
    case Scheme::QncNetwork: {
        const NetworkGraph graph =
            generate_network(n, config.edge_count, config.capacity, resolved_gateway(config),
                             role_seed(trial_seed, SeedRole::Graph));
        const double kappa = config.kappa_override > 0.0
                                 ? config.kappa_override
                                 : kappa_of(n, static_cast<int>(graph.edges.size()));
        const CodingCoefficients coeffs =
            draw_coefficients(graph, kappa, role_seed(trial_seed, SeedRole::Coefficients));
        for (const NodeNormalization& node : check_normalization(graph, coeffs)) {
            if (!node.compliant) ++outcome.violations;
        }
        const EncodeResult encoded = encode_round(graph, ensemble, coeffs, quantizer);
        outcome.clips += encoded.clamp_count;
        const std::vector<int> forwarders = select_forwarders(
            graph, config.forwarding, role_seed(trial_seed, SeedRole::Forwarding));
        const MeasurementSystem system =
            assemble_measurement(graph, coeffs, forwarders, encoded);
        outcome.rows = system.rows();
        outcome.load = static_cast<double>(system.rows()) *
                       static_cast<double>(config.packet_length);

        if (config.decoder == DecoderChoice::MedianOfMeans) {
            MedianDecoderParams params;
            if (config.block_size > 0) {
                params.block_size = config.block_size;
                params.block_count = config.block_count;
            } else {
                const PartitionChoice choice = choose_partition(
                    n, config.sparsity, ensemble.q_prime_max, kappa, quantizer.step,
                    config.epsilon, config.gamma, config.strict_median);
                params.block_size = choice.block_size;
                params.block_count = choice.block_count;
            }
            params.q_max = config.q_max;
            params.strict_median = config.strict_median;
            const DecoderReport report = median_of_means_decode_serial(
                system.received, system.psi, params, &ensemble.messages);
            outcome.block_size = params.block_size;
            outcome.block_count = params.block_count;
            outcome.clips += report.clip_count;
            outcome.abs_error.assign(report.per_coord_abs_error.data(),
                                     report.per_coord_abs_error.data() + n);
        } else {
            IstParams params;
            params.q_max = config.q_max;
            const DecoderReport report = ist_sparse_decode(
                system.received, system.psi, transform.matrix, params, &ensemble.messages);
            outcome.clips += report.clip_count;
            outcome.abs_error.assign(report.per_coord_abs_error.data(),
                                     report.per_coord_abs_error.data() + n);
        }
        break;
    }
    case Scheme::QncIdealized: {
        const double kappa = config.kappa_override > 0.0
                                 ? config.kappa_override
                                 : kappa_of(n, config.edge_count);
        MedianDecoderParams params;
        if (config.block_size > 0) {
            params.block_size = config.block_size;
            params.block_count = config.block_count;
        } else {
            const PartitionChoice choice = choose_partition(
                n, config.sparsity, ensemble.q_prime_max, kappa, quantizer.step,
                config.epsilon, config.gamma, config.strict_median);
            params.block_size = choice.block_size;
            params.block_count = choice.block_count;
        }
        params.q_max = config.q_max;
        params.strict_median = config.strict_median;
        const long long rows =
            static_cast<long long>(params.block_size) * params.block_count;
        const Eigen::MatrixXd psi = idealized_matrix(
            static_cast<int>(rows), n, kappa, role_seed(trial_seed, SeedRole::Graph));

        Rng noise_rng(role_seed(trial_seed, SeedRole::Noise));
        Eigen::VectorXd z = psi * ensemble.messages;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            z(i) += noise_rng.next_double(-quantizer.step, quantizer.step);
        }

        outcome.rows = rows;
        outcome.load = static_cast<double>(rows) * static_cast<double>(config.packet_length);
        outcome.block_size = params.block_size;
        outcome.block_count = params.block_count;

        if (config.decoder == DecoderChoice::MedianOfMeans) {
            const DecoderReport report =
                median_of_means_decode_serial(z, psi, params, &ensemble.messages);
            outcome.clips += report.clip_count;
            outcome.abs_error.assign(report.per_coord_abs_error.data(),
                                     report.per_coord_abs_error.data() + n);
        } else {
            IstParams ist;
            ist.q_max = config.q_max;
            const DecoderReport report =
                ist_sparse_decode(z, psi, transform.matrix, ist, &ensemble.messages);
            outcome.clips += report.clip_count;
            outcome.abs_error.assign(report.per_coord_abs_error.data(),
                                     report.per_coord_abs_error.data() + n);
        }
        break;
    }
    }
    outcome.completed = true;
    return outcome;
}

} // namespace

ExperimentRecord run_trials(const ExperimentConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();

    const Transform transform =
        make_transform(config.node_count, config.transform_kind, config.transform_seed);

    ExperimentRecord record;
    record.config = config;
    record.trial_seeds.resize(static_cast<std::size_t>(config.trials));
    for (int t = 0; t < config.trials; ++t) {
        record.trial_seeds[static_cast<std::size_t>(t)] =
            split_seed(config.master_seed, static_cast<std::uint64_t>(t));
    }

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
#ifdef _OPENMP
    const int workers = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (int t = 0; t < config.trials; ++t) {
        TrialOutcome& outcome = outcomes[static_cast<std::size_t>(t)];
        try {
            outcome = run_one_trial(config, transform,
                                    record.trial_seeds[static_cast<std::size_t>(t)]);
        } catch (const std::exception& e) {
            outcome.completed = false;
            outcome.abort_message = e.what();
        }
    }

    // Fixed-order aggregation: identical bytes for any worker count.
    std::vector<std::vector<double>> errors;
    errors.reserve(static_cast<std::size_t>(config.trials));
    double load_sum = 0.0;
    bool shape_recorded = false;
    for (const TrialOutcome& outcome : outcomes) {
        if (!outcome.completed) {
            ++record.aborted_trials;
            if (record.abort_messages.size() < 5) {
                record.abort_messages.push_back(outcome.abort_message);
            }
            continue;
        }
        ++record.completed_trials;
        errors.push_back(outcome.abs_error);
        load_sum += outcome.load;
        record.q_prime_max = std::max(record.q_prime_max, outcome.q_prime);
        record.clip_count += outcome.clips;
        record.norm_violations += outcome.violations;
        if (!shape_recorded) {
            record.measurement_rows = outcome.rows;
            record.block_size = outcome.block_size;
            record.block_count = outcome.block_count;
            shape_recorded = true;
        }
    }

    if (record.aborted_trials * 10 > config.trials) {
        std::string detail = record.abort_messages.empty() ? std::string("no detail")
                                                           : record.abort_messages.front();
        throw RunFailedError("run_trials: " + std::to_string(record.aborted_trials) + " of " +
                             std::to_string(config.trials) +
                             " trials aborted (>10%); first cause: " + detail);
    }

    if (!errors.empty()) {
        const DistortionEstimate estimate = estimate_distortion(errors);
        record.per_node_mean_abs_error = estimate.per_node_mean;
        record.distortion_max = estimate.max_over_nodes;
        record.load_delivered = load_sum / static_cast<double>(record.completed_trials);
    }

    if (config.scheme != Scheme::Qpf) {
        record.kappa = config.kappa_override > 0.0
                           ? config.kappa_override
                           : kappa_of(config.node_count, config.edge_count);
    }

    if (config.record_timing) {
        record.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    }
    return record;
}

DistortionEstimate estimate_distortion(
    const std::vector<std::vector<double>>& per_trial_abs_errors) {
    if (per_trial_abs_errors.empty()) {
        throw InvalidConfigError("estimate_distortion: need at least one trial");
    }
    const std::size_t n = per_trial_abs_errors.front().size();
    DistortionEstimate estimate;
    estimate.per_node_mean.assign(n, 0.0);
    for (const std::vector<double>& trial : per_trial_abs_errors) {
        if (trial.size() != n) {
            throw InvalidConfigError("estimate_distortion: ragged trial data");
        }
        for (std::size_t v = 0; v < n; ++v) estimate.per_node_mean[v] += trial[v];
    }
    const double count = static_cast<double>(per_trial_abs_errors.size());
    for (std::size_t v = 0; v < n; ++v) {
        estimate.per_node_mean[v] /= count;
        estimate.max_over_nodes = std::max(estimate.max_over_nodes, estimate.per_node_mean[v]);
    }
    return estimate;
}

const char* const kRecordCsvHeader =
    "scheme,n,edge_count,k,L,C0,q_max,q_prime_max,kappa,m,m1,m2,epsilon,gamma,trials,seed,"
    "distortion_max,load_delivered,clip_count,norm_violations,wall_ms";

void emit_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    out << kRecordCsvHeader << '\n';
    for (const ExperimentRecord& r : records) {
        out << scheme_name(r.config.scheme) << ',' << r.config.node_count << ','
            << r.config.edge_count << ',' << r.config.sparsity << ',' << r.config.packet_length
            << ',' << format_double(r.config.capacity) << ',' << format_double(r.config.q_max)
            << ',' << format_double(r.q_prime_max) << ',' << format_double(r.kappa) << ','
            << r.measurement_rows << ',' << r.block_size << ',' << r.block_count << ','
            << format_double(r.config.epsilon) << ',' << format_double(r.config.gamma) << ','
            << r.config.trials << ',' << r.config.master_seed << ','
            << format_double(r.distortion_max) << ',' << format_double(r.load_delivered) << ','
            << r.clip_count << ',' << r.norm_violations << ',' << r.wall_ms << '\n';
    }
}

void emit_jsonl(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    for (const ExperimentRecord& r : records) {
        nlohmann::json j;
        j["config"] = nlohmann::json::parse(config_to_text(r.config));
        j["trial_seeds"] = r.trial_seeds;
        j["per_node_mean_abs_error"] = r.per_node_mean_abs_error;
        j["distortion_max"] = r.distortion_max;
        j["load_delivered"] = r.load_delivered;
        j["kappa"] = r.kappa;
        j["q_prime_max"] = r.q_prime_max;
        j["m"] = r.measurement_rows;
        j["m1"] = r.block_size;
        j["m2"] = r.block_count;
        j["clip_count"] = r.clip_count;
        j["norm_violations"] = r.norm_violations;
        j["completed_trials"] = r.completed_trials;
        j["aborted_trials"] = r.aborted_trials;
        j["wall_ms"] = r.wall_ms;
        out << j.dump() << '\n';
    }
}

void emit_to_file(const std::vector<ExperimentRecord>& records, const std::string& path,
                  const std::string& format) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file " + path);
    if (format == "csv") {
        emit_csv(records, out);
    } else if (format == "json-lines" || format == "jsonl") {
        emit_jsonl(records, out);
    } else {
        throw InvalidConfigError("unknown output format: " + format);
    }
    if (!out.good()) throw IoError("write failed for " + path);
}

std::vector<RecordCsvRow> parse_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRecordCsvHeader) {
        throw IoError("records: missing or unexpected header");
    }
    std::vector<RecordCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream split(line);
        std::string cell;
        RecordCsvRow row;
        auto next = [&]() {
            if (!std::getline(split, cell, ',')) throw IoError("records: short row");
            return cell;
        };
        row.scheme = next();
        row.node_count = std::stoll(next());
        row.edge_count = std::stoll(next());
        row.sparsity = std::stoll(next());
        row.packet_length = std::stoll(next());
        row.capacity = parse_double(next());
        row.q_max = parse_double(next());
        row.q_prime_max = parse_double(next());
        row.kappa = parse_double(next());
        row.measurement_rows = std::stoll(next());
        row.block_size = std::stoll(next());
        row.block_count = std::stoll(next());
        row.epsilon = parse_double(next());
        row.gamma = parse_double(next());
        row.trials = std::stoll(next());
        row.seed = std::stoull(next());
        row.distortion_max = parse_double(next());
        row.load_delivered = parse_double(next());
        row.clip_count = std::stoll(next());
        row.norm_violations = std::stoll(next());
        row.wall_ms = std::stoll(next());
        rows.push_back(row);
    }
    return rows;
}

} // namespace qnclab
