#include "qnclab/qnc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qnclab/errors.hpp"
#include "qnclab/rng.hpp"
#include "qnclab/textio.hpp"

namespace qnclab {

double kappa_of(int node_count, int edge_count) {
    if (node_count < 1 || edge_count < 0) {
        throw InvalidConfigError("kappa_of: need node_count >= 1 and edge_count >= 0");
    }
    const double n = static_cast<double>(node_count);
    return std::sqrt(2.0 * n * n / (n + static_cast<double>(edge_count)));
}

CodingCoefficients draw_coefficients(const NetworkGraph& graph, double kappa,
                                     std::uint64_t seed) {
    if (kappa <= 0.0) {
        throw InvalidConfigError("draw_coefficients: kappa must be positive");
    }
    CodingCoefficients coeffs;
    coeffs.kappa = kappa;
    coeffs.node_gain.resize(static_cast<std::size_t>(graph.node_count));
    coeffs.edge_gain.resize(graph.edges.size());

    const EdgeIndex index = build_edge_index(graph);
    Rng rng(seed);
    for (int v = 0; v < graph.node_count; ++v) {
        coeffs.node_gain[static_cast<std::size_t>(v)] = rng.next_sign(kappa);
        for (int e : index.in[static_cast<std::size_t>(v)]) {
            coeffs.edge_gain[static_cast<std::size_t>(e)] = rng.next_sign(kappa);
        }
    }
    return coeffs;
}

EncodeResult encode_round(const NetworkGraph& graph, const MessageEnsemble& ensemble,
                          const CodingCoefficients& coeffs, const QuantizerSpec& spec) {
    const int n = graph.node_count;
    if (ensemble.messages.size() != n) {
        throw InvalidConfigError("encode_round: ensemble size does not match graph");
    }
    if (coeffs.node_gain.size() != static_cast<std::size_t>(n) ||
        coeffs.edge_gain.size() != graph.edges.size()) {
        throw InvalidConfigError("encode_round: coefficient shape does not match graph");
    }

    EncodeResult result;
    const std::size_t edge_count = graph.edges.size();
    result.broadcast.resize(edge_count);
    result.broadcast_noise.resize(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e) {
        const double x = ensemble.messages(graph.edges[e].tail);
        result.broadcast[e] = quantize_value(x, spec);
        result.broadcast_noise[e] = result.broadcast[e] - x;
    }

    const EdgeIndex index = build_edge_index(graph);
    result.combined.resize(static_cast<std::size_t>(n));
    result.forwarded.resize(static_cast<std::size_t>(n));
    result.forward_noise.resize(static_cast<std::size_t>(n));
    result.clamped.assign(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        double combo = 0.0;
        for (int e : index.in[static_cast<std::size_t>(v)]) {
            combo += coeffs.edge_gain[static_cast<std::size_t>(e)] *
                     result.broadcast[static_cast<std::size_t>(e)];
        }
        combo += coeffs.node_gain[static_cast<std::size_t>(v)] * ensemble.messages(v);
        result.combined[static_cast<std::size_t>(v)] = combo;

        bool clamped = false;
        result.forwarded[static_cast<std::size_t>(v)] = quantize_value(combo, spec, &clamped);
        result.forward_noise[static_cast<std::size_t>(v)] =
            result.forwarded[static_cast<std::size_t>(v)] - combo;
        if (clamped) {
            result.clamped[static_cast<std::size_t>(v)] = 1;
            ++result.clamp_count;
        }
    }
    return result;
}

std::vector<int> select_forwarders(const NetworkGraph& graph, const ForwardingMode& mode,
                                   std::uint64_t seed) {
    const int n = graph.node_count;
    std::vector<int> chosen;
    Rng rng(seed);
    switch (mode.kind) {
    case ForwardingMode::Kind::Bernoulli: {
        if (mode.probability < 0.0 || mode.probability > 1.0) {
            throw InvalidConfigError("select_forwarders: probability outside [0,1]");
        }
        for (int v = 0; v < n; ++v) {
            if (rng.next_double() < mode.probability) chosen.push_back(v);
        }
        break;
    }
    case ForwardingMode::Kind::Exact: {
        if (mode.count < 0 || mode.count > n) {
            throw InvalidConfigError("select_forwarders: subset size " +
                                     std::to_string(mode.count) + " outside 0.." +
                                     std::to_string(n));
        }
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < mode.count; ++i) {
            const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        chosen.assign(order.begin(), order.begin() + mode.count);
        std::sort(chosen.begin(), chosen.end());
        break;
    }
    }
    return chosen;
}

MeasurementSystem assemble_measurement(const NetworkGraph& graph,
                                       const CodingCoefficients& coeffs,
                                       const std::vector<int>& forwarders,
                                       const EncodeResult& encoded) {
    const int n = graph.node_count;
    const int m = static_cast<int>(forwarders.size());
    MeasurementSystem system;
    system.psi = Eigen::MatrixXd::Zero(m, n);
    system.received = Eigen::VectorXd::Zero(m);
    system.effective_noise = Eigen::VectorXd::Zero(m);
    system.row_source = forwarders;

    const EdgeIndex index = build_edge_index(graph);
    for (int i = 0; i < m; ++i) {
        const int v = forwarders[static_cast<std::size_t>(i)];
        if (v < 0 || v >= n) {
            throw InvalidConfigError("assemble_measurement: forwarder id out of range");
        }
        system.psi(i, v) += coeffs.node_gain[static_cast<std::size_t>(v)];
        double noise = encoded.forward_noise[static_cast<std::size_t>(v)];
        for (int e : index.in[static_cast<std::size_t>(v)]) {
            const double beta = coeffs.edge_gain[static_cast<std::size_t>(e)];
            system.psi(i, graph.edges[static_cast<std::size_t>(e)].tail) += beta;
            noise += beta * encoded.broadcast_noise[static_cast<std::size_t>(e)];
        }
        system.effective_noise(i) = noise;
        system.received(i) = encoded.forwarded[static_cast<std::size_t>(v)];
    }
    return system;
}

Eigen::MatrixXd idealized_matrix(int rows, int cols, double kappa, std::uint64_t seed) {
    if (kappa < 1.0) {
        throw InvalidConfigError("idealized_matrix: kappa must be >= 1 (zero-probability "
                                 "1 - 1/kappa^2 would be negative)");
    }
    if (rows < 0 || cols < 0) {
        throw InvalidConfigError("idealized_matrix: negative shape");
    }
    Eigen::MatrixXd psi(rows, cols);
    const double p_zero = 1.0 - 1.0 / (kappa * kappa);
    const double half_rest = p_zero + (1.0 - p_zero) / 2.0;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
        for (int j = 0; j < cols; ++j) {
            const double u = rng.next_double();
            psi(i, j) = u < p_zero ? 0.0 : (u < half_rest ? kappa : -kappa);
        }
    }
    return psi;
}

std::vector<NodeNormalization> check_normalization(const NetworkGraph& graph,
                                                   const CodingCoefficients& coeffs) {
    const EdgeIndex index = build_edge_index(graph);
    std::vector<NodeNormalization> report(static_cast<std::size_t>(graph.node_count));
    for (int v = 0; v < graph.node_count; ++v) {
        double sum = std::abs(coeffs.node_gain[static_cast<std::size_t>(v)]);
        for (int e : index.in[static_cast<std::size_t>(v)]) {
            sum += std::abs(coeffs.edge_gain[static_cast<std::size_t>(e)]);
        }
        report[static_cast<std::size_t>(v)] = {sum, sum <= 1.0};
    }
    return report;
}

void write_measurement_csv(const MeasurementSystem& system, std::ostream& out) {
    const int m = system.rows();
    const int n = system.cols();
    out << "# measurement m=" << m << " n=" << n << '\n';
    out << "row,source,z,n_eff";
    for (int j = 0; j < n; ++j) out << ",psi_" << j;
    out << '\n';
    for (int i = 0; i < m; ++i) {
        out << i << ',' << system.row_source[static_cast<std::size_t>(i)] << ','
            << format_double(system.received(i)) << ','
            << format_double(system.effective_noise(i));
        for (int j = 0; j < n; ++j) out << ',' << format_double(system.psi(i, j));
        out << '\n';
    }
}

MeasurementSystem read_measurement_csv(std::istream& in) {
    std::string meta;
    if (!std::getline(in, meta) || meta.rfind("# measurement", 0) != 0) {
        throw IoError("measurement: missing metadata line");
    }
    int m = 0;
    int n = 0;
    {
        std::istringstream parse(meta);
        std::string token;
        while (parse >> token) {
            if (token.rfind("m=", 0) == 0) m = std::stoi(token.substr(2));
            if (token.rfind("n=", 0) == 0) n = std::stoi(token.substr(2));
        }
    }
    std::string header;
    std::getline(in, header);

    MeasurementSystem system;
    system.psi = Eigen::MatrixXd::Zero(m, n);
    system.received = Eigen::VectorXd::Zero(m);
    system.effective_noise = Eigen::VectorXd::Zero(m);
    system.row_source.resize(static_cast<std::size_t>(m));
    std::string line;
    for (int i = 0; i < m; ++i) {
        if (!std::getline(in, line)) {
            throw IoError("measurement: truncated at row " + std::to_string(i));
        }
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        std::getline(row, cell, ',');
        system.row_source[static_cast<std::size_t>(i)] = std::stoi(cell);
        std::getline(row, cell, ',');
        system.received(i) = parse_double(cell);
        std::getline(row, cell, ',');
        system.effective_noise(i) = parse_double(cell);
        for (int j = 0; j < n; ++j) {
            if (!std::getline(row, cell, ',')) {
                throw IoError("measurement: truncated row " + std::to_string(i));
            }
            system.psi(i, j) = parse_double(cell);
        }
    }
    return system;
}

} // namespace qnclab
