#include "qnclab/qpf.hpp"

#include <cmath>
#include <string>

#include "qnclab/errors.hpp"
#include "qnclab/quantize.hpp"

namespace qnclab {

PacketLengthResult required_packet_length(double q_max, double target_distortion,
                                          double capacity) {
    if (q_max <= 0.0 || target_distortion <= 0.0 || capacity <= 0.0) {
        throw InvalidConfigError("required_packet_length: q_max, D0 and C0 must be positive");
    }
    if (target_distortion >= q_max) {
        return {1, true};
    }
    // delta/2 = q_max / floor(2^(L*C0)) <= D0. Search upward from the first
    // L with at least two levels; the cap has one unit of slack over the
    // closed-form (1/C0)*log2(q_max/D0).
    const int first = std::max(1, static_cast<int>(std::ceil(1.0 / capacity)));
    const int cap = first + 2 +
        static_cast<int>(std::ceil((std::log2(q_max / target_distortion) + 1.0) / capacity));
    for (int length = first; length <= cap; ++length) {
        const double bits = static_cast<double>(length) * capacity;
        if (bits > 62.0) break;
        const double cells = std::floor(std::exp2(bits));
        if (cells < 2.0) continue;
        if (q_max / cells <= target_distortion) {
            return {length, false};
        }
    }
    throw InvalidConfigError("required_packet_length: target distortion " +
                             std::to_string(target_distortion) +
                             " needs more than the supported 62 bits per packet");
}

long long qpf_load(long long node_count, int packet_length) {
    return (node_count - 1) * static_cast<long long>(packet_length);
}

QpfResult simulate_qpf(const NetworkGraph& graph, const MessageEnsemble& ensemble,
                       int packet_length) {
    const int n = graph.node_count;
    if (ensemble.messages.size() != n) {
        throw InvalidConfigError("simulate_qpf: ensemble size does not match graph");
    }
    const std::vector<int> hops = hops_to_gateway(graph);
    for (int v = 0; v < n; ++v) {
        if (v != graph.gateway && hops[static_cast<std::size_t>(v)] == kUnreachable) {
            throw RoutingInfeasibleError("simulate_qpf: node " + std::to_string(v) +
                                         " has no route to gateway " +
                                         std::to_string(graph.gateway));
        }
    }

    const QuantizerSpec spec = make_quantizer(ensemble.q_max, packet_length, graph.capacity);
    QpfResult result;
    result.recovered.resize(static_cast<std::size_t>(n));
    result.per_node_abs_error.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const double x = ensemble.messages(v);
        const double recovered = v == graph.gateway ? x : quantize_value(x, spec);
        result.recovered[static_cast<std::size_t>(v)] = recovered;
        result.per_node_abs_error[static_cast<std::size_t>(v)] = std::abs(x - recovered);
    }
    result.delivered_load = qpf_load(n, packet_length);
    long long hop_sum = 0;
    for (int v = 0; v < n; ++v) {
        if (v != graph.gateway) hop_sum += hops[static_cast<std::size_t>(v)];
    }
    result.hop_load = hop_sum * static_cast<long long>(packet_length);
    return result;
}

} // namespace qnclab
