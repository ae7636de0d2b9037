#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qnclab/network.hpp"
#include "qnclab/quantize.hpp"
#include "qnclab/sources.hpp"

namespace qnclab {

// One-step quantized network coding. Round 2: every node broadcasts its
// quantized message on its outgoing edges. Each node v then forms a random
// linear combination
//
//     P_v = sum_{e in In(v)} beta_{v,e} * Y_e  +  alpha_v * X_v
//
// with coefficients drawn from {-kappa, +kappa} (the node's own message
// enters unquantized), quantizes P_v, and may forward it to the gateway.
// The m received packets satisfy z = Psi * X + n_eff for the measurement
// matrix Psi and effective noise assembled here; that identity is the
// module's central correctness property and is exercised directly by tests.
//
// All operations are pure given (inputs, seed); a MeasurementSystem is
// immutable after assembly.

// kappa = sqrt(2 n^2 / (n + |E|)).
double kappa_of(int node_count, int edge_count);

struct CodingCoefficients {
    double kappa = 1.0;
    std::vector<double> node_gain; // alpha_v, indexed by node
    std::vector<double> edge_gain; // beta_{head(e),e}, indexed by edge
};

// Each alpha_v and beta_{v,e} independently +-kappa with probability 1/2.
// Per node: alpha first, then the betas of its incoming edges in edge-id
// order.
CodingCoefficients draw_coefficients(const NetworkGraph& graph, double kappa,
                                     std::uint64_t seed);

struct EncodeResult {
    std::vector<double> broadcast;       // Y_e(2) = Q(X_tail(e)), per edge
    std::vector<double> broadcast_noise; // N_e(2) = Y_e(2) - X_tail(e), per edge
    std::vector<double> combined;        // P_v, per node
    std::vector<double> forwarded;       // Q(clamp(P_v)), per node
    std::vector<double> forward_noise;   // N_e(3) = forwarded - P_v, per node
    std::vector<char> clamped;           // whether P_v hit the quantizer range
    int clamp_count = 0;
};

// P_v is clamped to the quantizer range before its own quantization; clamp
// events are counted, never fatal.
EncodeResult encode_round(const NetworkGraph& graph, const MessageEnsemble& ensemble,
                          const CodingCoefficients& coeffs, const QuantizerSpec& spec);

struct ForwardingMode {
    enum class Kind { Bernoulli, Exact };
    Kind kind = Kind::Bernoulli;
    double probability = 1.0; // Bernoulli
    int count = 0;            // Exact

    static ForwardingMode bernoulli(double p) { return {Kind::Bernoulli, p, 0}; }
    static ForwardingMode exact(int m) { return {Kind::Exact, 0.0, m}; }
};

// Bernoulli: each node independently with the given probability. Exact: a
// uniform m-subset. Result ordered by node id.
std::vector<int> select_forwarders(const NetworkGraph& graph, const ForwardingMode& mode,
                                   std::uint64_t seed);

struct MeasurementSystem {
    Eigen::MatrixXd psi;             // m x n
    Eigen::VectorXd received;        // z
    Eigen::VectorXd effective_noise; // n_eff, z = psi*X + n_eff
    std::vector<int> row_source;     // row index -> forwarding node
    int rows() const { return static_cast<int>(psi.rows()); }
    int cols() const { return static_cast<int>(psi.cols()); }
};

// One row per forwarder: entry (i, v') = alpha_{v'} at the row's source
// node v', beta summed over parallel edges elsewhere; z picks up the
// node-level quantized packet bit-for-bit. An empty forwarder list yields
// an empty (m = 0) system.
MeasurementSystem assemble_measurement(const NetworkGraph& graph,
                                       const CodingCoefficients& coeffs,
                                       const std::vector<int>& forwarders,
                                       const EncodeResult& encoded);

// I.i.d. surrogate matching the measurement-matrix moments exactly:
// entries are 0 with probability 1 - 1/kappa^2 and +-kappa with
// probability 1/(2 kappa^2) each, giving E[psi] = 0, E[psi^2] = 1,
// E[psi^4] = kappa^2. Requires kappa >= 1. Rows use independent derived
// seeds, so the result is identical however it is parallelized.
Eigen::MatrixXd idealized_matrix(int rows, int cols, double kappa, std::uint64_t seed);

struct NodeNormalization {
    double gain_sum = 0.0; // sum_{e in In(v)} |beta| + |alpha_v|
    bool compliant = false;
};

// Diagnostic for the no-overflow condition gain_sum <= 1; never mutates
// coefficients. With kappa from kappa_of every node violates it, which is
// why clamp counting exists.
std::vector<NodeNormalization> check_normalization(const NetworkGraph& graph,
                                                   const CodingCoefficients& coeffs);

// Dense CSV export: columns row,source,z,n_eff,psi_0..psi_{n-1}. Exact
// round-trip; consumed by the offline decoder.
void write_measurement_csv(const MeasurementSystem& system, std::ostream& out);
MeasurementSystem read_measurement_csv(std::istream& in);

} // namespace qnclab
