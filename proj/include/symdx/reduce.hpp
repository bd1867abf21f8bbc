#pragma once

#include "symdx/corpus.hpp"
#include "symdx/numkit.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace symdx::reduce {

struct PcaBasis {
    std::vector<double> mean;               // length d
    numkit::Matrix components;              // d x k, orthonormal columns
    std::vector<double> explained_variance; // length k, descending

    std::size_t dimension() const noexcept { return mean.size(); }
    std::size_t component_count() const noexcept { return explained_variance.size(); }
    /// Leading k components of this basis.
    PcaBasis truncated(std::size_t k) const;
};

/// Sample covariance with 1/(n-1) normalization.
numkit::Matrix covariance(const numkit::Matrix& x);

/// Top-k principal axes of the column-centered data. Throws KOutOfRange.
PcaBasis fit_pca(const numkit::Matrix& x, std::size_t k);
PcaBasis fit_pca(const corpus::DesignMatrix& m, std::size_t k);

numkit::Matrix project(const PcaBasis& basis, const numkit::Matrix& x);
corpus::DesignMatrix project(const PcaBasis& basis, const corpus::DesignMatrix& m);

struct SweepPoint {
    std::size_t k = 0;
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracy;
};

/// k-fold accuracy of the default LS-SVM on PCA-projected features, with the
/// basis fit on each training fold only.
std::vector<SweepPoint> component_sweep(const corpus::DesignMatrix& m,
                                        std::span<const std::size_t> k_values, std::size_t folds,
                                        std::uint64_t seed);

/// Smallest k whose mean accuracy exceeds the threshold; the best k if none does.
std::size_t select_component_count(const std::vector<SweepPoint>& sweep, double threshold = 0.91);

} // namespace symdx::reduce
