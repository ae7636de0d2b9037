#pragma once

#include <iosfwd>
#include <vector>

namespace qnclab {

// Analytic total-network-load calculators for the one-step coded scheme and
// the packet-forwarding baseline. Pure arithmetic; all logs natural unless
// flagged.

struct LoadBoundInputs {
    long long node_count = 0;    // n
    int sparsity = 0;            // k
    double q_max = 1.0;
    double q_prime_max = 1.0;
    double kappa = 1.0;
    double capacity = 1.0;       // C0
    double target_distortion = 0.0; // D0
    bool log_base2 = false;
    // Sweep convention for kappa: 0 keeps the fixed kappa above across n
    // (the log-growth reading); r > 0 rederives it per row from |E| = r*n.
    double edges_per_node = 0.0;
};

struct BoundGrid {
    std::vector<double> epsilons;
    std::vector<double> gammas;
    int max_packet_length = 32; // L' ranges over 1..max
};

// 200 log-spaced epsilons on (1e-3*D0, D0), gammas {0.25, 0.5, 1, 2, 4},
// L' in 1..32. The closed-form corner (gamma = 1, eps = D0 - 2*q_max/n) is
// always included when feasible, so the minimized value never exceeds the
// closed-form bound. Reproducible bit-for-bit.
BoundGrid default_grid(const LoadBoundInputs& inputs);

struct LoadBoundResult {
    bool feasible = false;
    double load = 0.0; // minimized m*L bound
    double epsilon = 0.0;
    double gamma = 0.0;
    int packet_length = 0; // argmin L'
};

// Minimizes 48*(1+gamma)*((kappa^2-1)*k*q'^2 + q^2*2^(2-2*L'*C0))/eps^2
// * L' * log(n) over grid points with eps*(1-n^-gamma) + 2*q*n^-gamma <= D0.
// An empty feasible set yields feasible = false, not an exception.
LoadBoundResult qnc_load_bound(const LoadBoundInputs& inputs, const BoundGrid& grid);

// Closed form 96*((kappa^2-1)*k*q'^2 + q^2*2^(2-2*C0)) / (D0 - 2q/n)^2
// * log(n); requires D0 > 2*q_max/n.
double qnc_load_closed_form(const LoadBoundInputs& inputs);

struct LoadComparisonRow {
    long long node_count = 0;
    int qpf_packet_length = 0;
    bool qpf_degenerate = false;
    double qpf_load = 0.0;
    double qnc_load = 0.0; // closed-form bound
    double ratio = 0.0;    // qnc / qpf
};

// One row per n; packet length from the baseline's distortion condition.
std::vector<LoadComparisonRow> compare_loads(const std::vector<long long>& node_counts,
                                             const LoadBoundInputs& shared);

void write_load_table_csv(const std::vector<LoadComparisonRow>& rows, std::ostream& out);

} // namespace qnclab
