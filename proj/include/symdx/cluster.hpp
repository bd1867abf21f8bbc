#pragma once

#include "symdx/numkit.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace symdx::cluster {

inline constexpr std::size_t max_iterations = 300;
inline constexpr std::size_t default_restarts = 10;

struct Clustering {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    numkit::Matrix centroids;           // k unit-norm rows
    double objective = 0.0;             // sum of squared distances to unit centroids
    double silhouette = 0.0;
    std::vector<double> objective_trace; // objective after each Lloyd iteration
    std::size_t iterations = 0;
    std::size_t restart = 0;            // index of the winning restart

    std::vector<std::size_t> sizes() const;
};

/// Rows scaled to unit Euclidean length. Throws ZeroRow.
numkit::Matrix normalize_rows(const numkit::Matrix& m);

/// Spherical k-means: assign by maximum cosine, centroid = renormalized
/// member mean, greedy farthest-point seeding. Best of `restarts` runs by
/// objective, earlier restart winning ties.
Clustering kmeans_cosine(const numkit::Matrix& m, std::size_t k, std::uint64_t seed,
                         std::size_t restarts = default_restarts);

enum class Distance { cosine };

/// Mean silhouette with cosine distance; singleton members score 0.
double silhouette(const numkit::Matrix& m, std::span<const std::size_t> assignments,
                  Distance metric = Distance::cosine);

struct SweepEntry {
    std::size_t k = 0;
    double silhouette = 0.0;
    double objective = 0.0;
};

std::vector<SweepEntry> k_sweep(const numkit::Matrix& m, std::span<const std::size_t> k_values,
                                std::uint64_t seed, std::size_t restarts = default_restarts);

} // namespace symdx::cluster
