#include "symdx/reduce.hpp"

#include "symdx/error.hpp"
#include "symdx/lssvm.hpp"

#include <algorithm>

namespace symdx::reduce {

PcaBasis PcaBasis::truncated(std::size_t k) const
{
    if (k == 0 || k > component_count())
        fail(ErrorCode::KOutOfRange, "cannot keep " + std::to_string(k) + " of " +
                                         std::to_string(component_count()) + " components");
    std::vector<std::size_t> cols(k);
    for (std::size_t j = 0; j < k; ++j)
        cols[j] = j;
    return {mean, components.select_cols(cols),
            {explained_variance.begin(), explained_variance.begin() + static_cast<std::ptrdiff_t>(k)}};
}

numkit::Matrix covariance(const numkit::Matrix& x)
{
    const std::size_t n = x.rows(), d = x.cols();
    if (n < 2)
        fail(ErrorCode::KOutOfRange, "covariance needs at least two rows");
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            mean[j] += x(i, j);
    for (double& m : mean)
        m /= static_cast<double>(n);

    numkit::Matrix c(d, d);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            centered[j] = x(i, j) - mean[j];
        for (std::size_t a = 0; a < d; ++a) {
            const double ca = centered[a];
            if (ca == 0.0)
                continue;
            auto row = c.row(a);
            for (std::size_t b = a; b < d; ++b)
                row[b] += ca * centered[b];
        }
    }
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            c(a, b) *= scale;
            c(b, a) = c(a, b);
        }
    return c;
}

PcaBasis fit_pca(const numkit::Matrix& x, std::size_t k)
{
    const std::size_t d = x.cols();
    if (k < 1 || k > d)
        fail(ErrorCode::KOutOfRange, "component count " + std::to_string(k) + " outside [1, " +
                                         std::to_string(d) + "]");
    if (x.rows() < 2)
        fail(ErrorCode::KOutOfRange, "PCA needs at least two rows");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            mean[j] += x(i, j);
    for (double& m : mean)
        m /= static_cast<double>(x.rows());

    auto eig = numkit::eig_sym(covariance(x));
    // Covariance is PSD; round-off can leave tiny negative eigenvalues.
    for (double& v : eig.values)
        v = std::max(v, 0.0);
    PcaBasis full{std::move(mean), std::move(eig.vectors), std::move(eig.values)};
    return k == d ? full : full.truncated(k);
}

PcaBasis fit_pca(const corpus::DesignMatrix& m, std::size_t k)
{
    return fit_pca(m.features, k);
}

numkit::Matrix project(const PcaBasis& basis, const numkit::Matrix& x)
{
    const std::size_t d = basis.dimension(), k = basis.component_count();
    if (x.cols() != d)
        fail(ErrorCode::DimensionMismatch, "data has " + std::to_string(x.cols()) +
                                               " columns, basis expects " + std::to_string(d));
    numkit::Matrix out(x.rows(), k);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j)
            centered[j] = x(i, j) - basis.mean[j];
        auto dst = out.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double cj = centered[j];
            if (cj == 0.0)
                continue;
            auto comp = basis.components.row(j);
            for (std::size_t c = 0; c < k; ++c)
                dst[c] += cj * comp[c];
        }
    }
    return out;
}

corpus::DesignMatrix project(const PcaBasis& basis, const corpus::DesignMatrix& m)
{
    corpus::DesignMatrix out{project(basis, m.features), m.labels, m.class_names, {}, m.encoding};
    for (std::size_t c = 0; c < basis.component_count(); ++c)
        out.feature_names.push_back("pc" + std::to_string(c + 1));
    return out;
}

std::vector<SweepPoint> component_sweep(const corpus::DesignMatrix& m,
                                        std::span<const std::size_t> k_values, std::size_t folds,
                                        std::uint64_t seed)
{
    for (auto k : k_values)
        if (k < 1 || k > m.cols())
            fail(ErrorCode::KOutOfRange, "component count " + std::to_string(k) + " outside [1, " +
                                             std::to_string(m.cols()) + "]");
    const auto partitions = corpus::kfold(m.labels, folds, seed);

    std::vector<SweepPoint> out;
    for (auto k : k_values)
        out.push_back({k, 0.0, std::vector<double>(partitions.size(), 0.0)});

    for (std::size_t f = 0; f < partitions.size(); ++f) {
        const auto train = m.subset_rows(partitions[f].train);
        const auto valid = m.subset_rows(partitions[f].validation);
        // The full eigenbasis is fit once per fold; each k keeps its leading columns.
        const PcaBasis full = fit_pca(train.features, m.cols());
        for (auto& point : out) {
            const PcaBasis basis = full.truncated(point.k);
            const auto train_k = project(basis, train);
            const auto valid_k = project(basis, valid);
            const auto model = lssvm::train(train_k, lssvm::KernelParams::defaults(point.k));
            const auto predicted = lssvm::predict_labels(model, valid_k.features);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < predicted.size(); ++i)
                hits += predicted[i] == valid_k.labels[i];
            point.fold_accuracy[f] = static_cast<double>(hits) / static_cast<double>(predicted.size());
        }
    }
    for (auto& point : out) {
        double sum = 0.0;
        for (double a : point.fold_accuracy)
            sum += a;
        point.mean_accuracy = sum / static_cast<double>(point.fold_accuracy.size());
    }
    return out;
}

std::size_t select_component_count(const std::vector<SweepPoint>& sweep, double threshold)
{
    if (sweep.empty())
        fail(ErrorCode::KOutOfRange, "empty sweep");
    std::vector<SweepPoint> sorted = sweep;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
    for (const auto& p : sorted)
        if (p.mean_accuracy > threshold)
            return p.k;
    return std::max_element(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
               return a.mean_accuracy < b.mean_accuracy;
           })->k;
}

} // namespace symdx::reduce
