#pragma once

#include <cstdint>
#include <vector>

#include "qnclab/network.hpp"
#include "qnclab/sources.hpp"

namespace qnclab {

// Quantize-and-packet-forward baseline: every non-gateway node quantizes its
// message and routes it to the gateway unchanged. The primary load metric
// counts the (n-1) delivered source packets times the packet length; the
// hop-weighted count is reported alongside because real forwarding cost
// scales with route length.

struct PacketLengthResult {
    int packet_length = 1;
    // D0 >= q_max: a single packet level already meets the target.
    bool degenerate = false;
};

// Smallest integer L whose quantizer mean error delta/2 is at most
// target_distortion; agrees with (1/C0)*log2(q_max/D0) within one unit.
PacketLengthResult required_packet_length(double q_max, double target_distortion,
                                          double capacity);

// Total network load (n-1)*L.
long long qpf_load(long long node_count, int packet_length);

struct QpfResult {
    std::vector<double> recovered;
    std::vector<double> per_node_abs_error;
    long long delivered_load = 0; // (n-1)*L
    long long hop_load = 0;       // sum_v hops(v)*L
};

// Throws RoutingInfeasibleError when some non-gateway node has no directed
// route to the gateway.
QpfResult simulate_qpf(const NetworkGraph& graph, const MessageEnsemble& ensemble,
                       int packet_length);

} // namespace qnclab
