#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qnclab/errors.hpp"
#include "qnclab/rng.hpp"
#include "qnclab/sources.hpp"

using namespace qnclab;

namespace {

int support_size(const Eigen::VectorXd& v) {
    int count = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("make_transform yields orthonormal matrices of every kind") {
    const Transform identity = make_transform(5, TransformKind::Identity);
    CHECK((identity.matrix - Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);

    const Transform dct = make_transform(8, TransformKind::DiscreteCosine);
    const Eigen::MatrixXd gram = dct.matrix.transpose() * dct.matrix;
    CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

    const Transform random = make_transform(16, TransformKind::RandomOrthonormal, 7);
    Rng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::VectorXd x(16);
        for (int i = 0; i < 16; ++i) x(i) = rng.next_double(-1.0, 1.0);
        CHECK(std::abs((random.matrix * x).norm() - x.norm()) < 1e-9);
    }

    // deterministic per (kind, seed)
    const Transform again = make_transform(16, TransformKind::RandomOrthonormal, 7);
    CHECK((again.matrix - random.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transform round-trip recovers coefficients and counts the support") {
    const Transform dct = make_transform(32, TransformKind::DiscreteCosine);
    const MessageEnsemble ensemble = sample_messages(32, 4, 1.0, dct, 99);
    const Eigen::VectorXd recovered = dct.matrix.transpose() * ensemble.messages;
    CHECK((recovered - ensemble.coefficients).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(support_size(ensemble.coefficients) == 4);
}

TEST_CASE("sampled ensembles satisfy all four invariants across seeds") {
    const int n = 16;
    const int k = 3;
    const double q_max = 2.5;
    const Transform dct = make_transform(n, TransformKind::DiscreteCosine);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const MessageEnsemble e = sample_messages(n, k, q_max, dct, seed);
        CHECK(e.messages.cwiseAbs().maxCoeff() <= q_max);
        CHECK(e.messages.cwiseAbs().maxCoeff() == q_max); // bound attained
        CHECK(support_size(e.coefficients) == k);
        const Eigen::VectorXd round = dct.matrix.transpose() * e.messages;
        CHECK((round - e.coefficients).cwiseAbs().maxCoeff() < 1e-10 * q_max);
        CHECK(e.messages.squaredNorm() <=
              k * e.q_prime_max * e.q_prime_max * (1.0 + 1e-12));
        CHECK(std::abs(e.messages.norm() - e.coefficients.norm()) < 1e-9);
        CHECK(e.q_prime_max == e.coefficients.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("identity transform pushes the sparsity into the messages") {
    const Transform identity = make_transform(12, TransformKind::Identity);
    const MessageEnsemble e = sample_messages(12, 5, 0.25, identity, 4);
    CHECK(support_size(e.messages) == 5);
    CHECK(e.messages.cwiseAbs().maxCoeff() == 0.25);
    CHECK((e.messages - e.coefficients).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the k=0 ensemble is the flagged all-zero one") {
    const Transform identity = make_transform(6, TransformKind::Identity);
    const MessageEnsemble e = sample_messages(6, 0, 1.0, identity, 1);
    CHECK(e.messages.cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.coefficients.cwiseAbs().maxCoeff() == 0.0);
    CHECK(e.q_prime_max == 0.0);
    CHECK(e.degenerate);
    CHECK_THROWS_AS(sample_messages(6, 7, 1.0, identity, 1), InvalidConfigError);
}

TEST_CASE("normalization preserves support and sign pattern") {
    const Transform dct = make_transform(20, TransformKind::DiscreteCosine);
    const MessageEnsemble small = sample_messages(20, 4, 0.125, dct, 321);
    const MessageEnsemble large = sample_messages(20, 4, 8.0, dct, 321);
    for (int v = 0; v < 20; ++v) {
        const double a = small.coefficients(v);
        const double b = large.coefficients(v);
        CHECK((a == 0.0) == (b == 0.0));
        if (a != 0.0) CHECK(std::signbit(a) == std::signbit(b));
    }
}

TEST_CASE("alternative coefficient laws stay exactly k-sparse") {
    const Transform dct = make_transform(24, TransformKind::DiscreteCosine);
    for (CoefficientLaw law :
         {CoefficientLaw::Uniform, CoefficientLaw::Gaussian, CoefficientLaw::Rademacher}) {
        const MessageEnsemble e = sample_messages(24, 6, 1.0, dct, 13, law);
        CHECK(support_size(e.coefficients) == 6);
        CHECK(e.messages.cwiseAbs().maxCoeff() == 1.0);
    }
}

TEST_CASE("ensemble CSV round-trips bit-exactly") {
    const Transform random = make_transform(10, TransformKind::RandomOrthonormal, 17);
    const MessageEnsemble e = sample_messages(10, 3, 0.7, random, 55);
    std::stringstream buffer;
    write_ensemble_csv(e, buffer);
    const MessageEnsemble back = read_ensemble_csv(buffer);
    CHECK(back.sparsity == e.sparsity);
    CHECK(back.q_max == e.q_max);
    CHECK(back.q_prime_max == e.q_prime_max);
    CHECK(back.transform_kind == e.transform_kind);
    CHECK(back.transform_seed == e.transform_seed);
    REQUIRE(back.messages.size() == e.messages.size());
    for (int v = 0; v < 10; ++v) {
        CHECK(back.messages(v) == e.messages(v));
        CHECK(back.coefficients(v) == e.coefficients(v));
    }
}
