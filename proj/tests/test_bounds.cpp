#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qnclab/bounds.hpp"
#include "qnclab/errors.hpp"
#include "qnclab/rng.hpp"

using namespace qnclab;

namespace {

LoadBoundInputs reference_inputs() {
    LoadBoundInputs in;
    in.node_count = 100;
    in.sparsity = 5;
    in.q_max = 1.0;
    in.q_prime_max = 1.0;
    in.kappa = 2.0;
    in.capacity = 1.0;
    in.target_distortion = 0.3;
    return in;
}

} // namespace

TEST_CASE("closed-form load bound reproduces hand-evaluated values") {
    const LoadBoundInputs in = reference_inputs();
    // 96 * (15 + 1) / 0.28^2 * ln(100)
    const double expected = 96.0 * 16.0 / (0.28 * 0.28) * std::log(100.0);
    CHECK(qnc_load_closed_form(in) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(qnc_load_closed_form(in) - 90224.0) <= 1.0);

    LoadBoundInputs bad = in;
    bad.target_distortion = 0.01; // below 2*q/n = 0.02
    CHECK_THROWS_WITH_AS(qnc_load_closed_form(bad), doctest::Contains("0.02"),
                         InvalidConfigError);

    // huge capacity kills the quantization term
    LoadBoundInputs wide = in;
    wide.capacity = 30.0;
    const double no_quant = 96.0 * 15.0 / (0.28 * 0.28) * std::log(100.0);
    CHECK(qnc_load_closed_form(wide) == doctest::Approx(no_quant).epsilon(1e-9));
}

TEST_CASE("grid minimization never exceeds the closed form") {
    const LoadBoundInputs in = reference_inputs();
    const LoadBoundResult best = qnc_load_bound(in, default_grid(in));
    REQUIRE(best.feasible);
    CHECK(best.load <= qnc_load_closed_form(in) * (1.0 + 1e-12));

    Rng rng(8080);
    for (int rep = 0; rep < 20; ++rep) {
        LoadBoundInputs random;
        random.node_count = 20 + static_cast<long long>(rng.next_below(20000));
        random.sparsity = 1 + static_cast<int>(rng.next_below(10));
        random.q_max = rng.next_double(0.1, 2.0);
        random.q_prime_max = rng.next_double(0.1, 2.0);
        random.kappa = rng.next_double(1.2, 3.0);
        random.capacity = rng.next_double(0.5, 2.0);
        const double floor_d0 = 2.0 * random.q_max / static_cast<double>(random.node_count);
        random.target_distortion = floor_d0 * 1.5 + rng.next_double(0.01, 0.5) * random.q_max;
        const LoadBoundResult result = qnc_load_bound(random, default_grid(random));
        REQUIRE(result.feasible);
        CHECK(result.load <= qnc_load_closed_form(random) * (1.0 + 1e-12));
    }
}

TEST_CASE("an unsatisfiable distortion target is reported infeasible") {
    LoadBoundInputs in = reference_inputs();
    in.node_count = 10;
    in.target_distortion = 1e-6; // 2q/n = 0.2 dominates at every grid gamma
    const LoadBoundResult result = qnc_load_bound(in, default_grid(in));
    CHECK_FALSE(result.feasible);
}

TEST_CASE("load bounds are monotone in the driving parameters") {
    const LoadBoundInputs base = reference_inputs();
    const double reference = qnc_load_closed_form(base);
    const LoadBoundResult base_min = qnc_load_bound(base, default_grid(base));

    LoadBoundInputs easier = base;
    easier.target_distortion = 0.5;
    CHECK(qnc_load_closed_form(easier) <= reference);
    CHECK(qnc_load_bound(easier, default_grid(easier)).load <= base_min.load);

    LoadBoundInputs denser = base;
    denser.sparsity = 9;
    CHECK(qnc_load_closed_form(denser) >= reference);
    CHECK(qnc_load_bound(denser, default_grid(denser)).load >= base_min.load);

    LoadBoundInputs louder = base;
    louder.q_prime_max = 2.0;
    CHECK(qnc_load_closed_form(louder) >= reference);
    CHECK(qnc_load_bound(louder, default_grid(louder)).load >= base_min.load);

    LoadBoundInputs wilder = base;
    wilder.kappa = 3.0;
    CHECK(qnc_load_closed_form(wilder) >= reference);
    CHECK(qnc_load_bound(wilder, default_grid(wilder)).load >= base_min.load);
}

TEST_CASE("load comparison shows log versus linear growth") {
    LoadBoundInputs in;
    in.sparsity = 5;
    in.q_max = 0.05; // small against D0 so the denominator drift is negligible
    in.q_prime_max = 1.0;
    in.kappa = 2.0;
    in.capacity = 1.0;
    in.target_distortion = 1.0;

    const std::vector<long long> ns = {100, 1000, 10000, 100000, 1000000};
    const std::vector<LoadComparisonRow> rows = compare_loads(ns, in);
    REQUIRE(rows.size() == 5);

    double min_scaled = 1e300;
    double max_scaled = 0.0;
    for (const LoadComparisonRow& row : rows) {
        const double scaled = row.qnc_load / std::log(static_cast<double>(row.node_count));
        min_scaled = std::min(min_scaled, scaled);
        max_scaled = std::max(max_scaled, scaled);
        CHECK(row.qpf_load ==
              static_cast<double>(row.node_count - 1) * row.qpf_packet_length);
        CHECK(row.qpf_packet_length == rows.front().qpf_packet_length);
    }
    CHECK(max_scaled / min_scaled < 1.01);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].ratio < rows[i - 1].ratio);
    }

    // the ratio of the closed-form values across the sweep is ln(1e6)/ln(1e2)
    const double growth = rows.back().qnc_load / rows.front().qnc_load;
    CHECK(std::abs(growth - 3.0) <= 0.005 * 3.0);

    // a single row reproduces the individual calculators
    LoadBoundInputs one = in;
    one.node_count = 100;
    const std::vector<LoadComparisonRow> single = compare_loads({100}, in);
    CHECK(single[0].qnc_load == qnc_load_closed_form(one));
    CHECK(single[0].ratio == single[0].qnc_load / single[0].qpf_load);

    std::ostringstream csv;
    write_load_table_csv(rows, csv);
    CHECK(csv.str().rfind("n,qpf_L,qpf_degenerate,qpf_load,qnc_load,ratio\n", 0) == 0);

    // alternative sweep convention: kappa rederived from |E| = 4n grows with
    // n, so the coded load loses its pure log scaling
    LoadBoundInputs derived = in;
    derived.edges_per_node = 4.0;
    const std::vector<LoadComparisonRow> derived_rows = compare_loads(ns, derived);
    const double first = derived_rows.front().qnc_load /
                         std::log(static_cast<double>(derived_rows.front().node_count));
    const double last = derived_rows.back().qnc_load /
                        std::log(static_cast<double>(derived_rows.back().node_count));
    CHECK(last / first > 100.0); // kappa^2 ~ 2n/5 dominates the sweep
}
