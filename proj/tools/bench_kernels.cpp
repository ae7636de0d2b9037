// Timing harness for the OpenMP kernels against their serial references.
// Verifies bit-identical results before reporting speedups.

#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qnclab/decode.hpp"
#include "qnclab/harness.hpp"
#include "qnclab/qnc.hpp"
#include "qnclab/rng.hpp"

using namespace qnclab;

namespace {

double now_seconds() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return static_cast<double>(clock()) / CLOCKS_PER_SEC;
#endif
}

void bench_median_decoder() {
    const int n = 256;
    const int m1 = 512;
    const int m2 = 63;
    const double kappa = 2.0;
    const Eigen::MatrixXd psi = idealized_matrix(m1 * m2, n, kappa, 1);
    const Transform identity = make_transform(n, TransformKind::Identity);
    const MessageEnsemble ensemble = sample_messages(n, 16, 1.0, identity, 2);
    Rng noise(3);
    Eigen::VectorXd z = psi * ensemble.messages;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += noise.next_double(-0.5, 0.5);

    MedianDecoderParams params;
    params.block_size = m1;
    params.block_count = m2;
    params.q_max = 1.0;

    const double t0 = now_seconds();
    const DecoderReport serial = median_of_means_decode_serial(z, psi, params);
    const double t1 = now_seconds();
    const DecoderReport parallel = median_of_means_decode(z, psi, params);
    const double t2 = now_seconds();

    const bool identical =
        (serial.estimate - parallel.estimate).cwiseAbs().maxCoeff() == 0.0;
    std::printf("median decoder   %6d x %4d  serial %8.1f ms  parallel %8.1f ms  "
                "speedup %5.2fx  identical %s\n",
                m1 * m2, n, (t1 - t0) * 1e3, (t2 - t1) * 1e3,
                (t1 - t0) / std::max(1e-9, t2 - t1), identical ? "yes" : "NO");
}

void bench_trial_loop() {
    ExperimentConfig config;
    config.scheme = Scheme::QncIdealized;
    config.node_count = 20;
    config.sparsity = 2;
    config.q_max = 1.0;
    config.capacity = 1.0;
    config.packet_length = 1;
    config.kappa_override = std::sqrt(2.0);
    config.epsilon = 0.5;
    config.gamma = 0.5;
    config.trials = 96;
    config.master_seed = 11;
    config.record_timing = false;

    config.threads = 1;
    const double t0 = now_seconds();
    const ExperimentRecord serial = run_trials(config);
    const double t1 = now_seconds();
    config.threads = 0; // library default
    const double t2 = now_seconds();
    const ExperimentRecord parallel = run_trials(config);
    const double t3 = now_seconds();

    std::ostringstream a;
    std::ostringstream b;
    a << serial.distortion_max << ' ' << serial.clip_count;
    b << parallel.distortion_max << ' ' << parallel.clip_count;
    const bool identical = a.str() == b.str() &&
                           serial.per_node_mean_abs_error == parallel.per_node_mean_abs_error;
    std::printf("trial loop       %6d trials     serial %8.1f ms  parallel %8.1f ms  "
                "speedup %5.2fx  identical %s\n",
                config.trials, (t1 - t0) * 1e3, (t3 - t2) * 1e3,
                (t1 - t0) / std::max(1e-9, t3 - t2), identical ? "yes" : "NO");
}

void bench_matrix_generation() {
    const int rows = 4000;
    const int cols = 1000;
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const double t0 = now_seconds();
    const Eigen::MatrixXd serial = idealized_matrix(rows, cols, 2.0, 21);
    const double t1 = now_seconds();
#ifdef _OPENMP
    omp_set_num_threads(max_threads);
#endif
    const double t2 = now_seconds();
    const Eigen::MatrixXd parallel = idealized_matrix(rows, cols, 2.0, 21);
    const double t3 = now_seconds();
    const bool identical = (serial - parallel).cwiseAbs().maxCoeff() == 0.0;
    std::printf("matrix sampling  %6d x %4d  serial %8.1f ms  parallel %8.1f ms  "
                "speedup %5.2fx  identical %s\n",
                rows, cols, (t1 - t0) * 1e3, (t3 - t2) * 1e3,
                (t1 - t0) / std::max(1e-9, t3 - t2), identical ? "yes" : "NO");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads available: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    bench_median_decoder();
    bench_trial_loop();
    bench_matrix_generation();
    return 0;
}
