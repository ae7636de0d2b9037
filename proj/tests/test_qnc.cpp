#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "qnclab/errors.hpp"
#include "qnclab/qnc.hpp"
#include "qnclab/rng.hpp"

using namespace qnclab;

namespace {

MessageEnsemble fixed_ensemble(const Eigen::VectorXd& x, double q_max) {
    MessageEnsemble e;
    e.messages = x;
    e.coefficients = x;
    e.q_max = q_max;
    e.q_prime_max = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    e.sparsity = static_cast<int>(x.size());
    return e;
}

} // namespace

TEST_CASE("kappa_of reproduces hand-computed values") {
    CHECK(kappa_of(10, 40) == 2.0);
    CHECK(kappa_of(2, 2) == doctest::Approx(1.41421356).epsilon(1e-8));
    CHECK(kappa_of(100, 400) == doctest::Approx(6.32455532).epsilon(1e-8));
    CHECK_THROWS_AS(kappa_of(0, 4), InvalidConfigError);
}

TEST_CASE("draw_coefficients is sign-symmetric with exact magnitudes") {
    const NetworkGraph g = generate_network(4, 6, 1.0, 3, 12);
    const double kappa = 1.7;

    // one coefficient across many seeds: empirical mean near zero
    double sum = 0.0;
    const int seeds = 100000;
    for (int s = 0; s < seeds; ++s) {
        const CodingCoefficients c = draw_coefficients(g, kappa, 5000 + s);
        sum += c.node_gain[0];
    }
    CHECK(std::abs(sum / seeds) < 0.02 * kappa);

    // every magnitude equals kappa exactly; one alpha per node, one beta
    // per incoming edge
    const CodingCoefficients c = draw_coefficients(g, kappa, 1);
    REQUIRE(c.node_gain.size() == 4);
    REQUIRE(c.edge_gain.size() == 6);
    for (double a : c.node_gain) CHECK(std::abs(a) == kappa);
    for (double b : c.edge_gain) CHECK(std::abs(b) == kappa);

    const CodingCoefficients again = draw_coefficients(g, kappa, 1);
    CHECK(again.node_gain == c.node_gain);
    CHECK(again.edge_gain == c.edge_gain);
}

TEST_CASE("encode_round matches the hand-computed two-node packet") {
    NetworkGraph g;
    g.node_count = 2;
    g.edges = {{0, 1}};
    g.capacity = 1.0;
    g.gateway = 1;

    Eigen::VectorXd x(2);
    x << 0.3, 0.5;
    const MessageEnsemble e = fixed_ensemble(x, 1.0);
    // wide quantizer range so the combination is not clamped
    const QuantizerSpec spec = make_quantizer(4.0, 5, 1.0); // 32 cells, step 0.25
    const CodingCoefficients coeffs = draw_coefficients(g, 1.5, 77);

    const EncodeResult round = encode_round(g, e, coeffs, spec);
    const double y = quantize_value(0.3, spec);
    CHECK(round.broadcast[0] == y);
    CHECK(round.broadcast_noise[0] == y - 0.3);

    // hand evaluation of the combination rule
    const double p0 = coeffs.node_gain[0] * 0.3; // In(0) empty
    const double p1 = coeffs.edge_gain[0] * y + coeffs.node_gain[1] * 0.5;
    CHECK(round.combined[0] == p0);
    CHECK(round.combined[1] == p1);
    CHECK(round.forwarded[1] == quantize_value(p1, spec));
    CHECK(round.forward_noise[1] == round.forwarded[1] - p1);
    CHECK(round.clamp_count == 0);

    // zero input: zero everywhere (zero is a cell edge for even cell counts)
    const EncodeResult zero = encode_round(g, fixed_ensemble(Eigen::VectorXd::Zero(2), 1.0),
                                           coeffs, spec);
    CHECK(zero.broadcast[0] == 0.0);
    CHECK(zero.combined[0] == 0.0);
    CHECK(zero.combined[1] == 0.0);
    CHECK(zero.forward_noise[1] == 0.0);
}

TEST_CASE("select_forwarders covers certain, empty and exact-subset modes") {
    const NetworkGraph g = generate_network(20, 30, 1.0, 19, 3);

    std::vector<int> all(20);
    for (int v = 0; v < 20; ++v) all[static_cast<std::size_t>(v)] = v;
    CHECK(select_forwarders(g, ForwardingMode::bernoulli(1.0), 7) == all);
    CHECK(select_forwarders(g, ForwardingMode::bernoulli(0.0), 7).empty());

    const std::vector<int> subset = select_forwarders(g, ForwardingMode::exact(5), 9);
    CHECK(subset.size() == 5);
    CHECK(std::set<int>(subset.begin(), subset.end()).size() == 5);
    CHECK(std::is_sorted(subset.begin(), subset.end()));

    CHECK_THROWS_AS(select_forwarders(g, ForwardingMode::exact(25), 9), InvalidConfigError);
    CHECK_THROWS_AS(select_forwarders(g, ForwardingMode::bernoulli(1.5), 9),
                    InvalidConfigError);
}

TEST_CASE("assemble_measurement matches a hand-built three-node system") {
    // nodes 0,1,2; edges 0->2 and 1->2; all three forward
    NetworkGraph g;
    g.node_count = 3;
    g.edges = {{0, 2}, {1, 2}};
    g.capacity = 1.0;
    g.gateway = 2;

    Eigen::VectorXd x(3);
    x << 0.25, -0.5, 0.75;
    const MessageEnsemble e = fixed_ensemble(x, 1.0);
    const QuantizerSpec spec = make_quantizer(8.0, 6, 1.0); // wide, clamp-free
    const CodingCoefficients coeffs = draw_coefficients(g, 1.25, 5);
    const EncodeResult round = encode_round(g, e, coeffs, spec);
    const std::vector<int> everyone = {0, 1, 2};
    const MeasurementSystem system = assemble_measurement(g, coeffs, everyone, round);

    REQUIRE(system.rows() == 3);
    // rows for the isolated-in-degree nodes 0 and 1: alpha only
    CHECK(system.psi(0, 0) == coeffs.node_gain[0]);
    CHECK(system.psi(0, 1) == 0.0);
    CHECK(system.psi(0, 2) == 0.0);
    CHECK(system.received(0) ==
          coeffs.node_gain[0] * x(0) + round.forward_noise[0]); // alpha*X + N3
    // row for node 2: betas from both edges plus its own alpha
    CHECK(system.psi(2, 0) == coeffs.edge_gain[0]);
    CHECK(system.psi(2, 1) == coeffs.edge_gain[1]);
    CHECK(system.psi(2, 2) == coeffs.node_gain[2]);
    const double expected_noise = round.forward_noise[2] +
                                  coeffs.edge_gain[0] * round.broadcast_noise[0] +
                                  coeffs.edge_gain[1] * round.broadcast_noise[1];
    CHECK(system.effective_noise(2) == doctest::Approx(expected_noise).epsilon(1e-15));
    CHECK(system.received(2) == round.forwarded[2]);
}

TEST_CASE("protocol and matrix views agree on random networks") {
    Rng pick(424242);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 3 + static_cast<int>(pick.next_below(28));
        const int edges = static_cast<int>(pick.next_below(121));
        const std::uint64_t seed = pick.next_u64();
        const NetworkGraph g = generate_network(n, edges, 1.0, n - 1, seed);
        const Transform dct = make_transform(n, TransformKind::DiscreteCosine);
        const MessageEnsemble e =
            sample_messages(n, std::min(3, n), 1.0, dct, split_seed(seed, 1));
        const QuantizerSpec spec = make_quantizer(1.0, 8, 1.0);
        const CodingCoefficients coeffs =
            draw_coefficients(g, kappa_of(n, edges), split_seed(seed, 2));
        const EncodeResult round = encode_round(g, e, coeffs, spec);
        const std::vector<int> forwarders =
            select_forwarders(g, ForwardingMode::bernoulli(0.7), split_seed(seed, 3));
        const MeasurementSystem system = assemble_measurement(g, coeffs, forwarders, round);
        if (system.rows() == 0) continue;
        const Eigen::VectorXd reconstructed =
            system.psi * e.messages + system.effective_noise;
        CHECK((system.received - reconstructed).cwiseAbs().maxCoeff() < 1e-10 * e.q_max);
    }
}

TEST_CASE("psi columns live only on rows fed by the column node") {
    const NetworkGraph g = generate_network(12, 40, 1.0, 11, 88);
    const Transform identity = make_transform(12, TransformKind::Identity);
    const MessageEnsemble e = sample_messages(12, 3, 1.0, identity, 2);
    const QuantizerSpec spec = make_quantizer(1.0, 8, 1.0);
    const CodingCoefficients coeffs = draw_coefficients(g, kappa_of(12, 40), 6);
    const EncodeResult round = encode_round(g, e, coeffs, spec);
    const std::vector<int> forwarders =
        select_forwarders(g, ForwardingMode::bernoulli(0.8), 10);
    const MeasurementSystem system = assemble_measurement(g, coeffs, forwarders, round);

    const EdgeIndex index = build_edge_index(g);
    for (int v = 0; v < 12; ++v) {
        std::set<int> allowed = {v};
        for (int edge : index.out[static_cast<std::size_t>(v)]) {
            allowed.insert(g.edges[static_cast<std::size_t>(edge)].head);
        }
        for (int i = 0; i < system.rows(); ++i) {
            if (system.psi(i, v) != 0.0) {
                CHECK(allowed.count(system.row_source[static_cast<std::size_t>(i)]) == 1);
            }
        }
    }
}

TEST_CASE("effective noise respects the per-row bound without clamping") {
    Rng pick(20231111);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 3 + static_cast<int>(pick.next_below(10));
        const int edges = static_cast<int>(pick.next_below(30));
        const NetworkGraph g = generate_network(n, edges, 1.0, n - 1, pick.next_u64());
        const Transform identity = make_transform(n, TransformKind::Identity);
        const double q_message = 0.5;
        const MessageEnsemble e =
            sample_messages(n, std::min(2, n), q_message, identity, pick.next_u64());
        const double kappa = kappa_of(n, edges);
        // quantizer range wide enough that no combination clamps
        const int max_in = 1 + static_cast<int>(edges);
        const QuantizerSpec spec =
            make_quantizer(kappa * (max_in + 1) * q_message, 10, 1.0);
        const CodingCoefficients coeffs = draw_coefficients(g, kappa, pick.next_u64());
        const EncodeResult round = encode_round(g, e, coeffs, spec);
        REQUIRE(round.clamp_count == 0);
        std::vector<int> everyone(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) everyone[static_cast<std::size_t>(v)] = v;
        const MeasurementSystem system = assemble_measurement(g, coeffs, everyone, round);
        const EdgeIndex index = build_edge_index(g);
        for (int i = 0; i < system.rows(); ++i) {
            const int v = system.row_source[static_cast<std::size_t>(i)];
            double beta_sum = 0.0;
            for (int edge : index.in[static_cast<std::size_t>(v)]) {
                beta_sum += std::abs(coeffs.edge_gain[static_cast<std::size_t>(edge)]);
            }
            const double bound = spec.step * (1.0 + beta_sum);
            CHECK(std::abs(system.effective_noise(i)) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("idealized matrix moments match in expectation and Monte Carlo") {
    // kappa=2: support {0, +-2} with P(0)=3/4; closed-form moments
    const Eigen::MatrixXd small = idealized_matrix(100, 100, 2.0, 5);
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double v = small(i, j);
            CHECK((v == 0.0 || v == 2.0 || v == -2.0));
        }
    }

    // kappa=1 never zero
    const Eigen::MatrixXd dense = idealized_matrix(50, 50, 1.0, 6);
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            CHECK(std::abs(dense(i, j)) == 1.0);
        }
    }

    const Eigen::MatrixXd big = idealized_matrix(1000, 1000, 2.0, 7);
    const double count = 1e6;
    double mean = 0.0;
    double second = 0.0;
    double fourth = 0.0;
    for (int i = 0; i < 1000; ++i) {
        for (int j = 0; j < 1000; ++j) {
            const double v = big(i, j);
            mean += v;
            second += v * v;
            fourth += v * v * v * v;
        }
    }
    CHECK(std::abs(mean / count) < 0.01);
    CHECK(std::abs(second / count - 1.0) < 0.02);
    CHECK(std::abs(fourth / count - 4.0) < 0.2);

    CHECK_THROWS_AS(idealized_matrix(10, 10, 0.9, 1), InvalidConfigError);

    // deterministic given seed, independent of parallel execution
    const Eigen::MatrixXd again = idealized_matrix(1000, 1000, 2.0, 7);
    CHECK((again - big).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("check_normalization flags every node when kappa exceeds one") {
    NetworkGraph g;
    g.node_count = 2;
    g.edges = {{0, 1}};
    g.gateway = 1;

    CodingCoefficients wide;
    wide.kappa = 2.0;
    wide.node_gain = {2.0, -2.0};
    wide.edge_gain = {2.0};
    const std::vector<NodeNormalization> wide_report = check_normalization(g, wide);
    CHECK(wide_report[1].gain_sum == 4.0);
    CHECK_FALSE(wide_report[1].compliant);

    CodingCoefficients narrow;
    narrow.kappa = 0.4;
    narrow.node_gain = {0.4, -0.4};
    narrow.edge_gain = {0.4};
    const std::vector<NodeNormalization> narrow_report = check_normalization(g, narrow);
    CHECK(narrow_report[1].gain_sum == doctest::Approx(0.8));
    CHECK(narrow_report[1].compliant);

    // with kappa from kappa_of, kappa >= sqrt(2), so every node violates
    const NetworkGraph random = generate_network(15, 45, 1.0, 14, 77);
    const double kappa = kappa_of(15, 45);
    CHECK(kappa >= std::sqrt(2.0));
    const CodingCoefficients coeffs = draw_coefficients(random, kappa, 4);
    for (const NodeNormalization& node : check_normalization(random, coeffs)) {
        CHECK_FALSE(node.compliant);
    }
}

TEST_CASE("empty forwarder lists give an empty measurement system") {
    const NetworkGraph g = generate_network(5, 8, 1.0, 4, 2);
    const Transform identity = make_transform(5, TransformKind::Identity);
    const MessageEnsemble e = sample_messages(5, 2, 1.0, identity, 3);
    const QuantizerSpec spec = make_quantizer(1.0, 4, 1.0);
    const CodingCoefficients coeffs = draw_coefficients(g, kappa_of(5, 8), 4);
    const EncodeResult round = encode_round(g, e, coeffs, spec);
    const MeasurementSystem system = assemble_measurement(g, coeffs, {}, round);
    CHECK(system.rows() == 0);
    CHECK(system.cols() == 5);
}

TEST_CASE("measurement CSV round-trips bit-exactly") {
    const NetworkGraph g = generate_network(8, 20, 1.0, 7, 17);
    const Transform dct = make_transform(8, TransformKind::DiscreteCosine);
    const MessageEnsemble e = sample_messages(8, 2, 1.0, dct, 5);
    const QuantizerSpec spec = make_quantizer(1.0, 8, 1.0);
    const CodingCoefficients coeffs = draw_coefficients(g, kappa_of(8, 20), 6);
    const EncodeResult round = encode_round(g, e, coeffs, spec);
    const std::vector<int> forwarders =
        select_forwarders(g, ForwardingMode::exact(6), 7);
    const MeasurementSystem system = assemble_measurement(g, coeffs, forwarders, round);

    std::stringstream buffer;
    write_measurement_csv(system, buffer);
    const MeasurementSystem back = read_measurement_csv(buffer);
    REQUIRE(back.rows() == system.rows());
    REQUIRE(back.cols() == system.cols());
    CHECK(back.row_source == system.row_source);
    CHECK((back.psi - system.psi).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.received - system.received).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.effective_noise - system.effective_noise).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream again;
    write_measurement_csv(back, again);
    CHECK(again.str() == buffer.str());
}
