#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qnclab/sources.hpp"

namespace qnclab {

// Median-of-means decoder. The rows of (z, Psi) are split into m2 blocks of
// m1 rows; block l estimates coordinate j by the correlation
//
//     r_{l,j} = (1/m1) * (Psi_l^T z_l)_j
//
// and the estimate of x_j is the median of r_{1,j}..r_{m2,j}, clipped to
// [-q_max, q_max]. The physical z carries no block scaling; the 1/m1 factor
// applied here is the block normalization, and folding the unscaled noise
// through it only shrinks its contribution.
//
// decode is parallelized across coordinates; each coordinate's summation
// order is fixed, so the result is bit-identical for any thread count and
// equal to the serial reference kept for tests and benchmarks.

struct MedianDecoderParams {
    int block_size = 1;  // m1
    int block_count = 1; // m2
    double q_max = 1.0;  // clipping bound
    // Odd block counts make the median a single order statistic, matching
    // the estimator's analysis; even counts average the two central values.
    bool strict_median = true;
};

struct DecoderReport {
    Eigen::VectorXd estimate;            // clipped x_hat
    Eigen::VectorXd per_coord_abs_error; // empty when truth is unknown
    int clip_count = 0;
    int dropped_rows = 0; // rows beyond m1*m2, dropped from the back
    bool converged = true; // iterative decoder only
    int iterations = 0;    // iterative decoder only
    std::vector<double> residuals; // per-iteration ||z - A s||, when recorded
    int block_size = 0;
    int block_count = 0;
};

// Throws InsufficientMeasurementsError when z has fewer than m1*m2 rows.
DecoderReport median_of_means_decode(const Eigen::VectorXd& z, const Eigen::MatrixXd& psi,
                                     const MedianDecoderParams& params,
                                     const Eigen::VectorXd* truth = nullptr);

// Serial reference implementation (same kernel, sequential outer loop).
DecoderReport median_of_means_decode_serial(const Eigen::VectorXd& z,
                                            const Eigen::MatrixXd& psi,
                                            const MedianDecoderParams& params,
                                            const Eigen::VectorXd* truth = nullptr);

struct PartitionChoice {
    int block_size = 1;  // m1
    int block_count = 1; // m2
};

// Accuracy-driven sizing: m1 is the smallest integer above
// 4*((kappa^2-1)*k*q'_max^2 + delta^2)/epsilon^2 and m2 the smallest integer
// above 12*(1+gamma)*log(n), bumped to odd under strict_median. Natural log
// by default; base 2 behind the flag for sensitivity studies.
PartitionChoice choose_partition(int n, int k, double q_prime_max, double kappa,
                                 double delta, double epsilon, double gamma,
                                 bool strict_median = true, bool log_base2 = false);

// Smallest packet count m strictly above
// 48*(1+gamma)*((kappa^2-1)*k*q'_max^2 + delta^2)/epsilon^2 * log(n);
// the constant factors as the product of the two partition bounds.
long long min_packets_for_accuracy(int n, int k, double q_prime_max, double kappa,
                                   double delta, double epsilon, double gamma,
                                   bool log_base2 = false);

// Iterative soft-thresholding on transform coefficients: minimizes
// ||z - Psi*phi*s||_2 with l1 shrinkage, step 1/||Psi*phi||_2^2 from power
// iteration, geometric threshold decay. Returns x_hat = phi*s_hat, clipped.
struct IstParams {
    double threshold_initial = -1.0; // <0: 0.1 * ||A^T z||_inf
    double threshold_final = -1.0;   // <0: 1e-4 * ||A^T z||_inf
    int max_iterations = 2000;
    double tolerance = 1e-10; // relative iterate change
    double q_max = 1.0;       // clipping bound
    bool record_residuals = false;
};

DecoderReport ist_sparse_decode(const Eigen::VectorXd& z, const Eigen::MatrixXd& psi,
                                const Eigen::MatrixXd& transform, const IstParams& params,
                                const Eigen::VectorXd* truth = nullptr);

} // namespace qnclab
