#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qnclab/qnc.hpp"
#include "qnclab/sources.hpp"

namespace qnclab {

// Monte Carlo driver. Trial t derives its seed from the master seed by the
// counter-based rule in rng.hpp, so runs are reproducible byte-for-byte and
// independent of how many worker threads execute the trial loop.

enum class Scheme { Qpf, QncNetwork, QncIdealized };
enum class DecoderChoice { MedianOfMeans, Ist };

std::string scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);
std::string decoder_name(DecoderChoice decoder);
DecoderChoice decoder_from_name(const std::string& name);

struct ExperimentConfig {
    Scheme scheme = Scheme::Qpf;
    // network
    int node_count = 2;
    int edge_count = 0;
    double capacity = 1.0;
    int gateway = -1; // -1: node_count - 1
    // sources
    int sparsity = 1;
    double q_max = 1.0;
    TransformKind transform_kind = TransformKind::Identity;
    std::uint64_t transform_seed = 0;
    CoefficientLaw coefficient_law = CoefficientLaw::Uniform;
    // quantizer
    int packet_length = 1;
    ReconstructionRule reconstruction = ReconstructionRule::LowerEdge;
    // coded scheme
    ForwardingMode forwarding = ForwardingMode::bernoulli(1.0);
    DecoderChoice decoder = DecoderChoice::MedianOfMeans;
    int block_size = 0;  // m1; 0 = derive from epsilon/gamma
    int block_count = 0; // m2
    double epsilon = 0.0;
    double gamma = 0.0;
    double kappa_override = 0.0; // 0 = kappa_of(n, |E|)
    bool strict_median = true;
    // run
    int trials = 1;
    std::uint64_t master_seed = 0;
    int threads = 0;          // 0 = library default
    bool record_timing = true; // false: wall_ms = 0, for byte-stable output
    std::string output_path;
};

int resolved_gateway(const ExperimentConfig& config);

// Checks every constituent-module precondition; throws InvalidConfigError.
void validate(const ExperimentConfig& config);

// Structured text form (JSON). Round-trips losslessly.
std::string config_to_text(const ExperimentConfig& config);
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct ExperimentRecord {
    ExperimentConfig config;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<double> per_node_mean_abs_error;
    double distortion_max = 0.0;
    double load_delivered = 0.0;   // mean over completed trials
    double kappa = 0.0;            // 0 for the forwarding baseline
    double q_prime_max = 0.0;      // max realized over trials
    long long measurement_rows = 0; // m
    int block_size = 0;            // m1 actually used
    int block_count = 0;           // m2 actually used
    long long clip_count = 0;      // encoder clamps + decoder clips, total
    long long norm_violations = 0; // nodes past the no-overflow line, total
    int completed_trials = 0;
    int aborted_trials = 0;
    std::vector<std::string> abort_messages; // first few, for diagnostics
    long long wall_ms = 0;
};

// Runs config.trials trials; per-trial errors abort that trial and are
// tallied. More than 10% aborted trials raises RunFailedError.
ExperimentRecord run_trials(const ExperimentConfig& config);

struct DistortionEstimate {
    std::vector<double> per_node_mean;
    double max_over_nodes = 0.0;
};

// Arithmetic mean of |X_v - X_hat_v| per node across trials; the scalar is
// the max over nodes.
DistortionEstimate estimate_distortion(const std::vector<std::vector<double>>& per_trial_abs_errors);

// CSV schema, fixed column order; doubles carry 17 significant digits.
extern const char* const kRecordCsvHeader;
void emit_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
void emit_jsonl(const std::vector<ExperimentRecord>& records, std::ostream& out);
void emit_to_file(const std::vector<ExperimentRecord>& records, const std::string& path,
                  const std::string& format);

// One parsed CSV row (the schema columns only), for round-trip checks.
struct RecordCsvRow {
    std::string scheme;
    long long node_count = 0, edge_count = 0, sparsity = 0, packet_length = 0;
    double capacity = 0, q_max = 0, q_prime_max = 0, kappa = 0;
    long long measurement_rows = 0, block_size = 0, block_count = 0;
    double epsilon = 0, gamma = 0;
    long long trials = 0;
    std::uint64_t seed = 0;
    double distortion_max = 0, load_delivered = 0;
    long long clip_count = 0, norm_violations = 0, wall_ms = 0;
};
std::vector<RecordCsvRow> parse_records_csv(std::istream& in);

} // namespace qnclab
