#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace qnclab {

// Correlated message ensembles: n bounded real messages X that are exactly
// k-sparse under an orthonormal transform. Generation happens in the sparse
// domain (support uniform over size-k subsets, coefficients drawn from a
// configurable law), then X = phi * S and the whole ensemble is rescaled so
// that ||X||_inf equals q_max exactly. Rescaling by a positive scalar
// preserves the support, the sign pattern, and the orthonormal relation.
// Pure functions of (parameters, seed).

enum class TransformKind { Identity, DiscreteCosine, RandomOrthonormal };

// Distribution of the nonzero transform coefficients before rescaling.
enum class CoefficientLaw { Uniform, Gaussian, Rademacher };

struct Transform {
    TransformKind kind = TransformKind::Identity;
    std::uint64_t seed = 0;
    Eigen::MatrixXd matrix; // n x n, orthonormal columns
};

// RandomOrthonormal orthogonalizes an n x n array of independent standard
// normal draws (Householder QR, columns sign-fixed); the other kinds ignore
// the seed.
Transform make_transform(int n, TransformKind kind, std::uint64_t seed = 0);

struct MessageEnsemble {
    Eigen::VectorXd messages;       // X, |X_v| <= q_max
    Eigen::VectorXd coefficients;   // S = phi^T X, exactly k nonzeros
    TransformKind transform_kind = TransformKind::Identity;
    std::uint64_t transform_seed = 0;
    int sparsity = 0;               // k
    double q_max = 1.0;
    double q_prime_max = 0.0;       // realized ||S||_inf
    bool degenerate = false;        // k == 0: all-zero ensemble
};

MessageEnsemble sample_messages(int n, int k, double q_max, const Transform& transform,
                                std::uint64_t seed,
                                CoefficientLaw law = CoefficientLaw::Uniform);

std::string transform_kind_name(TransformKind kind);
TransformKind transform_kind_from_name(const std::string& name);
std::string coefficient_law_name(CoefficientLaw law);
CoefficientLaw coefficient_law_from_name(const std::string& name);

// CSV with columns v,X,S; a leading metadata line carries k, q_max,
// q_prime_max and the transform descriptor. Exact round-trip.
void write_ensemble_csv(const MessageEnsemble& ensemble, std::ostream& out);
MessageEnsemble read_ensemble_csv(std::istream& in);

} // namespace qnclab
