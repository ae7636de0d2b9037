#include "qnclab/sources.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "qnclab/errors.hpp"
#include "qnclab/rng.hpp"
#include "qnclab/textio.hpp"

namespace qnclab {

Transform make_transform(int n, TransformKind kind, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidConfigError("make_transform: n must be at least 1");
    }
    Transform transform;
    transform.kind = kind;
    transform.seed = seed;
    switch (kind) {
    case TransformKind::Identity:
        transform.matrix = Eigen::MatrixXd::Identity(n, n);
        break;
    case TransformKind::DiscreteCosine: {
        // Orthonormal DCT-II basis as columns.
        Eigen::MatrixXd phi(n, n);
        const double pi = 3.141592653589793238462643383279502884;
        for (int j = 0; j < n; ++j) {
            const double scale = j == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            for (int i = 0; i < n; ++i) {
                phi(i, j) = scale * std::cos(pi * (2.0 * i + 1.0) * j / (2.0 * n));
            }
        }
        transform.matrix = phi;
        break;
    }
    case TransformKind::RandomOrthonormal: {
        Rng rng(seed);
        Eigen::MatrixXd normals(n, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                normals(i, j) = rng.next_normal();
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(normals);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        // Fix column signs so the factorization is canonical.
        for (int j = 0; j < n; ++j) {
            if (r(j, j) < 0.0) q.col(j) = -q.col(j);
        }
        transform.matrix = q;
        break;
    }
    }
    return transform;
}

MessageEnsemble sample_messages(int n, int k, double q_max, const Transform& transform,
                                std::uint64_t seed, CoefficientLaw law) {
    if (n < 1) {
        throw InvalidConfigError("sample_messages: n must be at least 1");
    }
    if (k < 0 || k > n) {
        throw InvalidConfigError("sample_messages: sparsity k=" + std::to_string(k) +
                                 " outside 0.." + std::to_string(n));
    }
    if (q_max <= 0.0) {
        throw InvalidConfigError("sample_messages: q_max must be positive");
    }
    if (transform.matrix.rows() != n || transform.matrix.cols() != n) {
        throw InvalidConfigError("sample_messages: transform size does not match n");
    }

    MessageEnsemble ensemble;
    ensemble.transform_kind = transform.kind;
    ensemble.transform_seed = transform.seed;
    ensemble.sparsity = k;
    ensemble.q_max = q_max;

    if (k == 0) {
        ensemble.messages = Eigen::VectorXd::Zero(n);
        ensemble.coefficients = Eigen::VectorXd::Zero(n);
        ensemble.q_prime_max = 0.0;
        ensemble.degenerate = true;
        return ensemble;
    }

    Rng rng(seed);

    // Support: uniform size-k subset via partial Fisher-Yates.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) {
        double value = 0.0;
        // A draw of exactly zero would break the exact-k support; redraw.
        do {
            switch (law) {
            case CoefficientLaw::Uniform:
                value = rng.next_double(-1.0, 1.0);
                break;
            case CoefficientLaw::Gaussian:
                value = rng.next_normal();
                break;
            case CoefficientLaw::Rademacher:
                value = rng.next_sign(1.0);
                break;
            }
        } while (value == 0.0);
        coeffs(order[static_cast<std::size_t>(i)]) = value;
    }

    Eigen::VectorXd messages = transform.matrix * coeffs;
    const double peak = messages.cwiseAbs().maxCoeff();
    const double scale = q_max / peak;
    messages *= scale;
    coeffs *= scale;

    // Pin the attaining entry to +-q_max exactly and absorb any one-ulp
    // overshoot from the rescaling.
    int arg_peak = 0;
    messages.cwiseAbs().maxCoeff(&arg_peak);
    messages(arg_peak) = messages(arg_peak) < 0.0 ? -q_max : q_max;
    for (int v = 0; v < n; ++v) {
        if (messages(v) > q_max) messages(v) = q_max;
        if (messages(v) < -q_max) messages(v) = -q_max;
    }

    ensemble.messages = std::move(messages);
    ensemble.coefficients = std::move(coeffs);
    ensemble.q_prime_max = ensemble.coefficients.cwiseAbs().maxCoeff();
    return ensemble;
}

std::string transform_kind_name(TransformKind kind) {
    switch (kind) {
    case TransformKind::Identity: return "identity";
    case TransformKind::DiscreteCosine: return "discrete-cosine";
    case TransformKind::RandomOrthonormal: return "random-orthonormal";
    }
    return "identity";
}

TransformKind transform_kind_from_name(const std::string& name) {
    if (name == "identity") return TransformKind::Identity;
    if (name == "discrete-cosine" || name == "dct") return TransformKind::DiscreteCosine;
    if (name == "random-orthonormal" || name == "random") return TransformKind::RandomOrthonormal;
    throw InvalidConfigError("unknown transform kind: " + name);
}

std::string coefficient_law_name(CoefficientLaw law) {
    switch (law) {
    case CoefficientLaw::Uniform: return "uniform";
    case CoefficientLaw::Gaussian: return "gaussian";
    case CoefficientLaw::Rademacher: return "rademacher";
    }
    return "uniform";
}

CoefficientLaw coefficient_law_from_name(const std::string& name) {
    if (name == "uniform") return CoefficientLaw::Uniform;
    if (name == "gaussian") return CoefficientLaw::Gaussian;
    if (name == "rademacher") return CoefficientLaw::Rademacher;
    throw InvalidConfigError("unknown coefficient law: " + name);
}

void write_ensemble_csv(const MessageEnsemble& ensemble, std::ostream& out) {
    out << "# ensemble n=" << ensemble.messages.size() << " k=" << ensemble.sparsity
        << " q_max=" << format_double(ensemble.q_max)
        << " q_prime_max=" << format_double(ensemble.q_prime_max)
        << " transform=" << transform_kind_name(ensemble.transform_kind)
        << " transform_seed=" << ensemble.transform_seed
        << " degenerate=" << (ensemble.degenerate ? 1 : 0) << '\n';
    out << "v,X,S\n";
    for (Eigen::Index v = 0; v < ensemble.messages.size(); ++v) {
        out << v << ',' << format_double(ensemble.messages(v)) << ','
            << format_double(ensemble.coefficients(v)) << '\n';
    }
}

namespace {

std::string meta_field(const std::string& line, const std::string& key) {
    const std::string token = key + "=";
    const auto pos = line.find(token);
    if (pos == std::string::npos) {
        throw IoError("ensemble: missing metadata field " + key);
    }
    const auto start = pos + token.size();
    auto end = line.find(' ', start);
    if (end == std::string::npos) end = line.size();
    return line.substr(start, end - start);
}

} // namespace

MessageEnsemble read_ensemble_csv(std::istream& in) {
    std::string meta;
    if (!std::getline(in, meta) || meta.rfind("# ensemble", 0) != 0) {
        throw IoError("ensemble: missing metadata line");
    }
    MessageEnsemble ensemble;
    const int n = std::stoi(meta_field(meta, "n"));
    ensemble.sparsity = std::stoi(meta_field(meta, "k"));
    ensemble.q_max = parse_double(meta_field(meta, "q_max"));
    ensemble.q_prime_max = parse_double(meta_field(meta, "q_prime_max"));
    ensemble.transform_kind = transform_kind_from_name(meta_field(meta, "transform"));
    ensemble.transform_seed = std::stoull(meta_field(meta, "transform_seed"));
    ensemble.degenerate = meta_field(meta, "degenerate") == "1";

    std::string header;
    if (!std::getline(in, header) || header != "v,X,S") {
        throw IoError("ensemble: missing column header");
    }
    ensemble.messages = Eigen::VectorXd::Zero(n);
    ensemble.coefficients = Eigen::VectorXd::Zero(n);
    std::string line;
    for (int v = 0; v < n; ++v) {
        if (!std::getline(in, line)) {
            throw IoError("ensemble: truncated at row " + std::to_string(v));
        }
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        const int id = std::stoi(cell);
        if (id != v) throw IoError("ensemble: unexpected row id");
        std::getline(row, cell, ',');
        ensemble.messages(v) = parse_double(cell);
        std::getline(row, cell, ',');
        ensemble.coefficients(v) = parse_double(cell);
    }
    return ensemble;
}

} // namespace qnclab
