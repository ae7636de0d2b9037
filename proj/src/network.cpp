#include "qnclab/network.hpp"

#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qnclab/errors.hpp"
#include "qnclab/rng.hpp"
#include "qnclab/textio.hpp"

namespace qnclab {

NetworkGraph generate_network(int node_count, int edge_count, double capacity,
                              int gateway, std::uint64_t seed) {
    if (node_count < 2) {
        throw InvalidConfigError("generate_network: need at least 2 nodes, got " +
                                 std::to_string(node_count));
    }
    if (gateway < 0 || gateway >= node_count) {
        throw InvalidConfigError("generate_network: gateway " + std::to_string(gateway) +
                                 " out of range 0.." + std::to_string(node_count - 1));
    }
    if (edge_count < 0) {
        throw InvalidConfigError("generate_network: negative edge count");
    }
    if (capacity <= 0.0) {
        throw InvalidConfigError("generate_network: capacity must be positive");
    }

    NetworkGraph graph;
    graph.node_count = node_count;
    graph.capacity = capacity;
    graph.gateway = gateway;
    graph.edges.reserve(static_cast<std::size_t>(edge_count));

    Rng rng(seed);
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(node_count) * static_cast<std::uint64_t>(node_count - 1);
    for (int e = 0; e < edge_count; ++e) {
        const std::uint64_t idx = rng.next_below(pairs);
        const int tail = static_cast<int>(idx / static_cast<std::uint64_t>(node_count - 1));
        const int offset = static_cast<int>(idx % static_cast<std::uint64_t>(node_count - 1));
        const int head = offset < tail ? offset : offset + 1;
        graph.edges.push_back({tail, head});
    }
    return graph;
}

void validate_graph(const NetworkGraph& graph) {
    if (graph.node_count < 1) {
        throw InvalidConfigError("graph: node_count must be positive");
    }
    if (graph.gateway < 0 || graph.gateway >= graph.node_count) {
        throw InvalidConfigError("graph: gateway out of range");
    }
    if (graph.capacity <= 0.0) {
        throw InvalidConfigError("graph: capacity must be positive");
    }
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const Edge& edge = graph.edges[e];
        if (edge.tail == edge.head) {
            throw InvalidConfigError("graph: self-loop at edge " + std::to_string(e));
        }
        if (edge.tail < 0 || edge.tail >= graph.node_count || edge.head < 0 ||
            edge.head >= graph.node_count) {
            throw InvalidConfigError("graph: node id out of range at edge " + std::to_string(e));
        }
    }
}

std::vector<int> incoming(const NetworkGraph& graph, int v) {
    std::vector<int> ids;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (graph.edges[e].head == v) ids.push_back(static_cast<int>(e));
    }
    return ids;
}

std::vector<int> outgoing(const NetworkGraph& graph, int v) {
    std::vector<int> ids;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (graph.edges[e].tail == v) ids.push_back(static_cast<int>(e));
    }
    return ids;
}

EdgeIndex build_edge_index(const NetworkGraph& graph) {
    EdgeIndex index;
    index.in.resize(static_cast<std::size_t>(graph.node_count));
    index.out.resize(static_cast<std::size_t>(graph.node_count));
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        index.out[static_cast<std::size_t>(graph.edges[e].tail)].push_back(static_cast<int>(e));
        index.in[static_cast<std::size_t>(graph.edges[e].head)].push_back(static_cast<int>(e));
    }
    return index;
}

std::vector<int> hops_to_gateway(const NetworkGraph& graph) {
    std::vector<int> hops(static_cast<std::size_t>(graph.node_count), kUnreachable);
    // reverse adjacency: for node v, the tails of edges pointing at v
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(graph.node_count));
    for (const Edge& edge : graph.edges) {
        rev[static_cast<std::size_t>(edge.head)].push_back(edge.tail);
    }
    std::deque<int> queue;
    hops[static_cast<std::size_t>(graph.gateway)] = 0;
    queue.push_back(graph.gateway);
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : rev[static_cast<std::size_t>(v)]) {
            if (hops[static_cast<std::size_t>(u)] == kUnreachable) {
                hops[static_cast<std::size_t>(u)] = hops[static_cast<std::size_t>(v)] + 1;
                queue.push_back(u);
            }
        }
    }
    return hops;
}

void write_graph(const NetworkGraph& graph, std::ostream& out) {
    out << graph.node_count << ' ' << graph.edges.size() << ' '
        << format_double(graph.capacity) << ' ' << graph.gateway << '\n';
    for (const Edge& edge : graph.edges) {
        out << edge.tail << ' ' << edge.head << '\n';
    }
}

NetworkGraph read_graph(std::istream& in) {
    NetworkGraph graph;
    std::size_t edge_count = 0;
    std::string capacity_text;
    if (!(in >> graph.node_count >> edge_count >> capacity_text >> graph.gateway)) {
        throw IoError("graph: malformed header line");
    }
    graph.capacity = parse_double(capacity_text);
    graph.edges.resize(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e) {
        if (!(in >> graph.edges[e].tail >> graph.edges[e].head)) {
            throw IoError("graph: truncated edge list at edge " + std::to_string(e));
        }
    }
    validate_graph(graph);
    return graph;
}

} // namespace qnclab
