#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qnclab {

// Directed multigraph over nodes 0..n-1 with a distinguished gateway (sink)
// node. Every link has the same capacity in bits per channel use. Parallel
// edges are allowed: edges are drawn i.i.d. uniformly over ordered node
// pairs, so deduplicating them would distort the placement statistics.
// Immutable after construction; safe to share across concurrent trials.

struct Edge {
    int tail = 0;
    int head = 0;
};

struct NetworkGraph {
    int node_count = 0;
    std::vector<Edge> edges;
    double capacity = 1.0; // bits per channel use
    int gateway = 0;
};

inline constexpr int kUnreachable = -1;

// Draws edge_count edges independently and uniformly over the n(n-1)
// ordered pairs (tail, head), tail != head. Deterministic given seed.
NetworkGraph generate_network(int node_count, int edge_count, double capacity,
                              int gateway, std::uint64_t seed);

// Throws InvalidConfigError on self-loops, out-of-range ids, or bad gateway.
void validate_graph(const NetworkGraph& graph);

// Edge ids e with head(e)=v / tail(e)=v, ascending.
std::vector<int> incoming(const NetworkGraph& graph, int v);
std::vector<int> outgoing(const NetworkGraph& graph, int v);

// Precomputed incoming/outgoing lists for all nodes (edge ids ascending).
struct EdgeIndex {
    std::vector<std::vector<int>> in;
    std::vector<std::vector<int>> out;
};
EdgeIndex build_edge_index(const NetworkGraph& graph);

// Shortest directed hop count from each node to the gateway (breadth-first
// over reversed edges). Gateway maps to 0; kUnreachable marks nodes with no
// directed path.
std::vector<int> hops_to_gateway(const NetworkGraph& graph);

// Line-oriented text format: header "n |E| C0 gateway", then one
// "tail head" pair per line. Node ids are 0-based. Exact round-trip.
void write_graph(const NetworkGraph& graph, std::ostream& out);
NetworkGraph read_graph(std::istream& in);

} // namespace qnclab
