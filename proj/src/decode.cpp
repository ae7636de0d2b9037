#include "qnclab/decode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qnclab/errors.hpp"

namespace qnclab {

namespace {

double clip(double v, double bound) { return std::min(bound, std::max(-bound, v)); }

// Block correlations and median for one coordinate; fixed summation order.
double estimate_coordinate(const Eigen::VectorXd& z, const Eigen::MatrixXd& psi, int j,
                           int block_size, int block_count, bool strict_median,
                           std::vector<double>& scratch) {
    scratch.resize(static_cast<std::size_t>(block_count));
    for (int l = 0; l < block_count; ++l) {
        double dot = 0.0;
        const int base = l * block_size;
        for (int i = 0; i < block_size; ++i) {
            dot += psi(base + i, j) * z(base + i);
        }
        scratch[static_cast<std::size_t>(l)] = dot / static_cast<double>(block_size);
    }
    (void)strict_median; // even counts are rejected upstream in strict mode
    const auto mid = scratch.begin() + block_count / 2;
    std::nth_element(scratch.begin(), mid, scratch.end());
    if (block_count % 2 == 1) {
        return *mid;
    }
    const double upper = *mid;
    const double lower = *std::max_element(scratch.begin(), mid);
    return (lower + upper) / 2.0;
}

DecoderReport median_decode_impl(const Eigen::VectorXd& z, const Eigen::MatrixXd& psi,
                                 const MedianDecoderParams& params,
                                 const Eigen::VectorXd* truth, bool parallel) {
    if (params.block_size < 1 || params.block_count < 1) {
        throw InvalidConfigError("median decoder: block_size and block_count must be positive");
    }
    if (params.strict_median && params.block_count % 2 == 0) {
        throw InvalidConfigError("median decoder: strict median needs an odd block count, got " +
                                 std::to_string(params.block_count));
    }
    const long long needed =
        static_cast<long long>(params.block_size) * static_cast<long long>(params.block_count);
    const long long have = static_cast<long long>(psi.rows());
    if (z.size() != psi.rows()) {
        throw InvalidConfigError("median decoder: z length does not match psi rows");
    }
    if (have < needed) {
        throw InsufficientMeasurementsError(
            "median decoder: need m1*m2 = " + std::to_string(needed) + " rows, have " +
            std::to_string(have));
    }

    const int n = static_cast<int>(psi.cols());
    DecoderReport report;
    report.estimate = Eigen::VectorXd::Zero(n);
    report.dropped_rows = static_cast<int>(have - needed);
    report.block_size = params.block_size;
    report.block_count = params.block_count;

    std::vector<int> clipped(static_cast<std::size_t>(n), 0);
#pragma omp parallel if (parallel)
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (int j = 0; j < n; ++j) {
            const double raw = estimate_coordinate(z, psi, j, params.block_size,
                                                   params.block_count, params.strict_median,
                                                   scratch);
            const double value = clip(raw, params.q_max);
            report.estimate(j) = value;
            if (value != raw) clipped[static_cast<std::size_t>(j)] = 1;
        }
    }
    for (int flag : clipped) report.clip_count += flag;

    if (truth) {
        report.per_coord_abs_error = (report.estimate - *truth).cwiseAbs();
    }
    return report;
}

} // namespace

DecoderReport median_of_means_decode(const Eigen::VectorXd& z, const Eigen::MatrixXd& psi,
                                     const MedianDecoderParams& params,
                                     const Eigen::VectorXd* truth) {
    return median_decode_impl(z, psi, params, truth, true);
}

DecoderReport median_of_means_decode_serial(const Eigen::VectorXd& z,
                                            const Eigen::MatrixXd& psi,
                                            const MedianDecoderParams& params,
                                            const Eigen::VectorXd* truth) {
    return median_decode_impl(z, psi, params, truth, false);
}

namespace {

double log_n(int n, bool log_base2) {
    return log_base2 ? std::log2(static_cast<double>(n)) : std::log(static_cast<double>(n));
}

// smallest integer strictly greater than bound
long long next_integer_above(double bound) {
    if (!(bound < 9e18)) {
        throw InvalidConfigError("packet bound: value " + std::to_string(bound) +
                                 " is out of integer range (epsilon too small?)");
    }
    return static_cast<long long>(std::floor(bound)) + 1;
}

void check_bound_args(int n, int k, double q_prime_max, double kappa, double delta,
                      double epsilon, double gamma) {
    if (n < 1 || k < 0) {
        throw InvalidConfigError("packet bound: need n >= 1, k >= 0");
    }
    if (q_prime_max < 0.0 || kappa < 1.0 || delta < 0.0) {
        throw InvalidConfigError("packet bound: need q'_max >= 0, kappa >= 1, delta >= 0");
    }
    if (epsilon <= 0.0 || gamma <= 0.0) {
        throw InvalidConfigError("packet bound: epsilon and gamma must be positive");
    }
}

} // namespace

PartitionChoice choose_partition(int n, int k, double q_prime_max, double kappa,
                                 double delta, double epsilon, double gamma,
                                 bool strict_median, bool log_base2) {
    check_bound_args(n, k, q_prime_max, kappa, delta, epsilon, gamma);
    const double variance_term =
        (kappa * kappa - 1.0) * static_cast<double>(k) * q_prime_max * q_prime_max +
        delta * delta;
    const double m1_bound = 4.0 * variance_term / (epsilon * epsilon);
    const double m2_bound = 12.0 * (1.0 + gamma) * log_n(n, log_base2);

    const long long m1 = std::max(1ll, next_integer_above(m1_bound));
    long long m2 = std::max(1ll, next_integer_above(m2_bound));
    if (strict_median && m2 % 2 == 0) ++m2;
    if (m1 > 1ll << 30 || m2 > 1ll << 30) {
        throw InvalidConfigError("choose_partition: bounds exceed the supported block range");
    }
    PartitionChoice choice;
    choice.block_size = static_cast<int>(m1);
    choice.block_count = static_cast<int>(m2);
    return choice;
}

long long min_packets_for_accuracy(int n, int k, double q_prime_max, double kappa,
                                   double delta, double epsilon, double gamma,
                                   bool log_base2) {
    check_bound_args(n, k, q_prime_max, kappa, delta, epsilon, gamma);
    const double variance_term =
        (kappa * kappa - 1.0) * static_cast<double>(k) * q_prime_max * q_prime_max +
        delta * delta;
    const double bound =
        48.0 * (1.0 + gamma) * variance_term / (epsilon * epsilon) * log_n(n, log_base2);
    return next_integer_above(bound);
}

namespace {

// Largest squared singular value of a, by power iteration on a^T a.
double squared_spectral_norm(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.cols());
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd w = a.transpose() * (a * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        lambda = norm;
    }
    return lambda;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

} // namespace

DecoderReport ist_sparse_decode(const Eigen::VectorXd& z, const Eigen::MatrixXd& psi,
                                const Eigen::MatrixXd& transform, const IstParams& params,
                                const Eigen::VectorXd* truth) {
    if (psi.cols() != transform.rows()) {
        throw InvalidConfigError("ist decoder: psi and transform shapes do not match");
    }
    if (z.size() != psi.rows()) {
        throw InvalidConfigError("ist decoder: z length does not match psi rows");
    }
    const int n = static_cast<int>(transform.cols());

    const Eigen::MatrixXd a = psi * transform;
    const Eigen::VectorXd correlate = a.transpose() * z;
    const double corr_peak = correlate.size() > 0 ? correlate.cwiseAbs().maxCoeff() : 0.0;

    DecoderReport report;
    report.block_size = 0;
    report.block_count = 0;
    if (corr_peak == 0.0) {
        // zero data (or zero operator): zero is the shrinkage fixed point
        report.estimate = Eigen::VectorXd::Zero(n);
        if (truth) report.per_coord_abs_error = (report.estimate - *truth).cwiseAbs();
        return report;
    }

    const double lipschitz = std::max(squared_spectral_norm(a), 1e-300);
    const double step = 1.0 / lipschitz;
    const double t_initial =
        params.threshold_initial > 0.0 ? params.threshold_initial : 0.1 * corr_peak;
    const double t_final =
        params.threshold_final > 0.0 ? params.threshold_final : 1e-4 * corr_peak;
    const int iters = std::max(1, params.max_iterations);
    // reach the final threshold with a third of the budget to spare, so the
    // fixed-threshold tail can settle and report convergence
    const int decay_span = std::max(1, (2 * iters) / 3);
    const double decay = std::pow(t_final / t_initial, 1.0 / static_cast<double>(decay_span));

    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    double threshold = t_initial;
    bool converged = false;
    int used = 0;
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd residual = a * s - z;
        if (params.record_residuals) report.residuals.push_back(residual.norm());
        const Eigen::VectorXd gradient = a.transpose() * residual;
        Eigen::VectorXd next(n);
        for (int j = 0; j < n; ++j) {
            next(j) = soft_threshold(s(j) - step * gradient(j), step * threshold);
        }
        const double change = (next - s).norm();
        const double scale = std::max(1.0, s.norm());
        s = std::move(next);
        ++used;
        if (threshold <= t_final && change <= params.tolerance * scale) {
            converged = true;
            break;
        }
        threshold = std::max(t_final, threshold * decay);
    }
    if (params.record_residuals) report.residuals.push_back((a * s - z).norm());

    report.converged = converged;
    report.iterations = used;
    Eigen::VectorXd x_hat = transform * s;
    for (int v = 0; v < x_hat.size(); ++v) {
        const double clipped = clip(x_hat(v), params.q_max);
        if (clipped != x_hat(v)) ++report.clip_count;
        x_hat(v) = clipped;
    }
    report.estimate = std::move(x_hat);
    if (truth) report.per_coord_abs_error = (report.estimate - *truth).cwiseAbs();
    return report;
}

} // namespace qnclab
