#include "symdx/cluster.hpp"

#include "symdx/error.hpp"
#include "symdx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>

namespace symdx::cluster {

namespace {

// Cosine distances this close to zero are rounding noise between identical
// directions; treating them as exact keeps degenerate silhouettes at 0.
constexpr double distance_noise = 1e-12;

double clean(double distance)
{
    return std::abs(distance) < distance_noise ? 0.0 : distance;
}

struct Run {
    std::vector<std::size_t> assignments;
    numkit::Matrix centroids;
    double objective = 0.0;
    std::vector<double> trace;
    std::size_t iterations = 0;
};

std::size_t nearest(const numkit::Matrix& centroids, std::span<const double> u, double* best_sim)
{
    std::size_t best = 0;
    double sim = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double s = numkit::dot(centroids.row(c), u);
        if (s > sim) {
            sim = s;
            best = c;
        }
    }
    if (best_sim)
        *best_sim = sim;
    return best;
}

numkit::Matrix seed_centroids(const numkit::Matrix& u, std::size_t k, std::size_t start)
{
    const std::size_t n = u.rows();
    numkit::Matrix centroids(k, u.cols());
    std::vector<bool> chosen(n, false);
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::size_t next = start;
    for (std::size_t c = 0; c < k; ++c) {
        chosen[next] = true;
        std::copy(u.row(next).begin(), u.row(next).end(), centroids.row(c).begin());
        for (std::size_t i = 0; i < n; ++i)
            min_dist[i] = std::min(min_dist[i], 1.0 - numkit::dot(u.row(i), centroids.row(c)));
        double far = -1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!chosen[i] && min_dist[i] > far) {
                far = min_dist[i];
                next = i;
            }
    }
    return centroids;
}

void update_centroids(const numkit::Matrix& u, const std::vector<std::size_t>& assignments,
                      numkit::Matrix& centroids)
{
    const std::size_t k = centroids.rows(), d = u.cols();
    numkit::Matrix sums(k, d);
    std::vector<std::size_t> first_member(k, SIZE_MAX);
    for (std::size_t i = 0; i < u.rows(); ++i) {
        const std::size_t c = assignments[i];
        if (first_member[c] == SIZE_MAX)
            first_member[c] = i;
        auto dst = sums.row(c);
        auto src = u.row(i);
        for (std::size_t j = 0; j < d; ++j)
            dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        auto s = sums.row(c);
        const double norm = std::sqrt(numkit::dot(s, s));
        auto dst = centroids.row(c);
        if (norm > 0.0) {
            for (std::size_t j = 0; j < d; ++j)
                dst[j] = s[j] / norm;
        } else if (first_member[c] != SIZE_MAX) {
            // Members cancel out exactly; fall back to one of them.
            std::copy(u.row(first_member[c]).begin(), u.row(first_member[c]).end(), dst.begin());
        }
    }
}

double objective_of(const numkit::Matrix& u, const std::vector<std::size_t>& assignments,
                    const numkit::Matrix& centroids)
{
    double j = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        auto x = u.row(i);
        auto mu = centroids.row(assignments[i]);
        double s = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
            const double diff = x[t] - mu[t];
            s += diff * diff;
        }
        j += s;
    }
    return j;
}

// Moves the row farthest from its centroid (among clusters with more than one
// member) into each empty cluster.
void reseed_empty(const numkit::Matrix& u, std::vector<std::size_t>& assignments,
                  const numkit::Matrix& centroids, std::size_t k)
{
    std::vector<std::size_t> counts(k, 0);
    for (auto a : assignments)
        ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0)
            continue;
        std::size_t worst = SIZE_MAX;
        double worst_sim = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < u.rows(); ++i) {
            if (counts[assignments[i]] < 2)
                continue;
            const double s = numkit::dot(u.row(i), centroids.row(assignments[i]));
            if (s < worst_sim) {
                worst_sim = s;
                worst = i;
            }
        }
        if (worst == SIZE_MAX)
            fail(ErrorCode::KOutOfRange, "cannot fill empty cluster");
        --counts[assignments[worst]];
        assignments[worst] = c;
        ++counts[c];
    }
}

Run run_once(const numkit::Matrix& u, std::size_t k, std::size_t start)
{
    Run run;
    run.centroids = seed_centroids(u, k, start);
    const std::size_t n = u.rows();
    std::vector<std::size_t> previous;
    run.assignments.assign(n, 0);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            run.assignments[i] = nearest(run.centroids, u.row(i), nullptr);
        reseed_empty(u, run.assignments, run.centroids, k);
        update_centroids(u, run.assignments, run.centroids);
        run.objective = objective_of(u, run.assignments, run.centroids);
        run.trace.push_back(run.objective);
        run.iterations = iter + 1;
        if (run.assignments == previous)
            break;
        previous = run.assignments;
    }
    return run;
}

} // namespace

std::vector<std::size_t> Clustering::sizes() const
{
    std::vector<std::size_t> out(k, 0);
    for (auto a : assignments)
        ++out[a];
    return out;
}

numkit::Matrix normalize_rows(const numkit::Matrix& m)
{
    numkit::Matrix u = m;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        auto row = u.row(i);
        const double norm = std::sqrt(numkit::dot(row, row));
        if (norm == 0.0)
            fail(ErrorCode::ZeroRow, "row " + std::to_string(i) + " is all zeros");
        for (double& v : row)
            v /= norm;
    }
    return u;
}

Clustering kmeans_cosine(const numkit::Matrix& m, std::size_t k, std::uint64_t seed,
                         std::size_t restarts)
{
    const std::size_t n = m.rows();
    if (k < 2 || k > n)
        fail(ErrorCode::KOutOfRange, "cluster count " + std::to_string(k) + " outside [2, " +
                                         std::to_string(n) + "]");
    const numkit::Matrix u = normalize_rows(m);
    Rng rng(seed);
    std::vector<std::size_t> starts(std::max<std::size_t>(restarts, 1));
    for (auto& s : starts)
        s = rng.uniform_index(n);
    std::vector<std::future<Run>> pending;
    for (std::size_t start : starts)
        pending.push_back(std::async(std::launch::async, [&u, k, start] { return run_once(u, k, start); }));

    // Strict comparison keeps the lowest restart index on equal objectives.
    std::optional<Run> best;
    std::size_t best_restart = 0;
    for (std::size_t r = 0; r < pending.size(); ++r) {
        Run run = pending[r].get();
        if (!best || run.objective < best->objective) {
            best = std::move(run);
            best_restart = r;
        }
    }

    Clustering out;
    out.k = k;
    out.assignments = std::move(best->assignments);
    out.centroids = std::move(best->centroids);
    out.objective = best->objective;
    out.objective_trace = std::move(best->trace);
    out.iterations = best->iterations;
    out.restart = best_restart;
    out.silhouette = silhouette(u, out.assignments);
    return out;
}

double silhouette(const numkit::Matrix& m, std::span<const std::size_t> assignments, Distance)
{
    const std::size_t n = m.rows();
    if (assignments.size() != n)
        fail(ErrorCode::DimensionMismatch, "one assignment per row required");
    const numkit::Matrix u = normalize_rows(m);
    const std::size_t k = n == 0 ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;

    std::vector<std::size_t> counts(k, 0);
    numkit::Matrix sums(k, u.cols());
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[assignments[i]];
        auto dst = sums.row(assignments[i]);
        auto src = u.row(i);
        for (std::size_t j = 0; j < src.size(); ++j)
            dst[j] += src[j];
    }
    const auto non_empty = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    if (non_empty < 2)
        fail(ErrorCode::SingleCluster, "silhouette needs at least two non-empty clusters");

    // Mean cosine distance from u_i to cluster c is 1 - u_i . S_c / |c| on
    // unit rows, so every term comes from the per-cluster sums.
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = assignments[i];
        if (counts[own] < 2)
            continue;
        auto ui = u.row(i);
        const double self = numkit::dot(ui, ui);
        const double a = clean(1.0 - (numkit::dot(ui, sums.row(own)) - self) /
                                         static_cast<double>(counts[own] - 1));
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || counts[c] == 0)
                continue;
            b = std::min(b, clean(1.0 - numkit::dot(ui, sums.row(c)) / static_cast<double>(counts[c])));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0)
            total += std::clamp((b - a) / denom, -1.0, 1.0);
    }
    return total / static_cast<double>(n);
}

std::vector<SweepEntry> k_sweep(const numkit::Matrix& m, std::span<const std::size_t> k_values,
                                std::uint64_t seed, std::size_t restarts)
{
    std::vector<SweepEntry> out;
    for (auto k : k_values) {
        const Clustering c = kmeans_cosine(m, k, seed, restarts);
        out.push_back({k, c.silhouette, c.objective});
    }
    return out;
}

} // namespace symdx::cluster
