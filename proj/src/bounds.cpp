#include "qnclab/bounds.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "qnclab/errors.hpp"
#include "qnclab/qpf.hpp"
#include "qnclab/textio.hpp"

namespace qnclab {

namespace {

void check_inputs(const LoadBoundInputs& in) {
    if (in.node_count < 2) {
        throw InvalidConfigError("load bound: node_count must be at least 2");
    }
    if (in.sparsity < 0 || in.q_max <= 0.0 || in.q_prime_max < 0.0 || in.kappa < 1.0 ||
        in.capacity <= 0.0 || in.target_distortion <= 0.0) {
        throw InvalidConfigError("load bound: invalid parameter");
    }
}

double log_n(const LoadBoundInputs& in) {
    const double n = static_cast<double>(in.node_count);
    return in.log_base2 ? std::log2(n) : std::log(n);
}

double sparsity_term(const LoadBoundInputs& in) {
    return (in.kappa * in.kappa - 1.0) * static_cast<double>(in.sparsity) *
           in.q_prime_max * in.q_prime_max;
}

} // namespace

BoundGrid default_grid(const LoadBoundInputs& inputs) {
    check_inputs(inputs);
    BoundGrid grid;
    const double d0 = inputs.target_distortion;
    const int points = 200;
    grid.epsilons.reserve(points + 1);
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        grid.epsilons.push_back(d0 * std::pow(10.0, -3.0 * (1.0 - t)));
    }
    const double corner = d0 - 2.0 * inputs.q_max / static_cast<double>(inputs.node_count);
    if (corner > 0.0) grid.epsilons.push_back(corner);
    grid.gammas = {0.25, 0.5, 1.0, 2.0, 4.0};
    grid.max_packet_length = 32;
    return grid;
}

LoadBoundResult qnc_load_bound(const LoadBoundInputs& inputs, const BoundGrid& grid) {
    check_inputs(inputs);
    if (grid.epsilons.empty() || grid.gammas.empty() || grid.max_packet_length < 1) {
        throw InvalidConfigError("load bound: empty search grid");
    }
    const double n = static_cast<double>(inputs.node_count);
    const double d0 = inputs.target_distortion;
    const double sterm = sparsity_term(inputs);
    const double logn = log_n(inputs);

    LoadBoundResult best;
    for (double gamma : grid.gammas) {
        const double tail = std::pow(n, -gamma);
        for (double eps : grid.epsilons) {
            if (eps <= 0.0) continue;
            if (eps * (1.0 - tail) + 2.0 * inputs.q_max * tail > d0) continue;
            for (int lp = 1; lp <= grid.max_packet_length; ++lp) {
                const double quant_term =
                    inputs.q_max * inputs.q_max *
                    std::exp2(2.0 - 2.0 * static_cast<double>(lp) * inputs.capacity);
                const double load = 48.0 * (1.0 + gamma) * (sterm + quant_term) / (eps * eps) *
                                    static_cast<double>(lp) * logn;
                if (!best.feasible || load < best.load) {
                    best = {true, load, eps, gamma, lp};
                }
            }
        }
    }
    return best;
}

double qnc_load_closed_form(const LoadBoundInputs& inputs) {
    check_inputs(inputs);
    const double n = static_cast<double>(inputs.node_count);
    const double margin = inputs.target_distortion - 2.0 * inputs.q_max / n;
    if (margin <= 0.0) {
        throw InvalidConfigError("closed-form load bound requires D0 > 2*q_max/n = " +
                                 format_double(2.0 * inputs.q_max / n));
    }
    const double quant_term =
        inputs.q_max * inputs.q_max * std::exp2(2.0 - 2.0 * inputs.capacity);
    return 96.0 * (sparsity_term(inputs) + quant_term) / (margin * margin) * log_n(inputs);
}

std::vector<LoadComparisonRow> compare_loads(const std::vector<long long>& node_counts,
                                             const LoadBoundInputs& shared) {
    std::vector<LoadComparisonRow> rows;
    rows.reserve(node_counts.size());
    for (long long n : node_counts) {
        LoadBoundInputs inputs = shared;
        inputs.node_count = n;
        if (shared.edges_per_node > 0.0) {
            const double edges = shared.edges_per_node * static_cast<double>(n);
            inputs.kappa = std::sqrt(2.0 * static_cast<double>(n) * static_cast<double>(n) /
                                     (static_cast<double>(n) + edges));
        }
        LoadComparisonRow row;
        row.node_count = n;
        const PacketLengthResult length = required_packet_length(
            inputs.q_max, inputs.target_distortion, inputs.capacity);
        row.qpf_packet_length = length.packet_length;
        row.qpf_degenerate = length.degenerate;
        row.qpf_load = static_cast<double>(qpf_load(n, length.packet_length));
        row.qnc_load = qnc_load_closed_form(inputs);
        row.ratio = row.qnc_load / row.qpf_load;
        rows.push_back(row);
    }
    return rows;
}

void write_load_table_csv(const std::vector<LoadComparisonRow>& rows, std::ostream& out) {
    out << "n,qpf_L,qpf_degenerate,qpf_load,qnc_load,ratio\n";
    for (const LoadComparisonRow& row : rows) {
        out << row.node_count << ',' << row.qpf_packet_length << ','
            << (row.qpf_degenerate ? 1 : 0) << ',' << format_double(row.qpf_load) << ','
            << format_double(row.qnc_load) << ',' << format_double(row.ratio) << '\n';
    }
}

} // namespace qnclab
