#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eloreview/domain.hpp"
#include "eloreview/rng.hpp"

namespace eloreview {

struct PoolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Default bucket edges for stratified sampling: width-2 intervals over
// [1, 10], the last one open past 10 so a rating of exactly 10 lands in it.
inline const std::vector<double> kDefaultIntervalEdges = {1, 3, 5, 7, 9, 11};

// Variance threshold above which papers are dropped by default. Arbitrary;
// override via pool.max_variance in the config file.
inline constexpr double kDefaultMaxVariance = 2.0;

// Loads a line-delimited JSON pool file. Every malformed line, duplicate id,
// or invariant violation is reported with its line number; any failure is
// fatal and raises PoolError listing all of them.
std::vector<Paper> load_pool(const std::filesystem::path& path);

void save_pool(const std::filesystem::path& path, const std::vector<Paper>& papers);

// Keeps exactly the papers with rating_variance <= max_variance, in order.
// Pass +infinity to disable filtering.
std::vector<Paper> variance_filter(std::vector<Paper> papers, double max_variance);

// Buckets papers by avg_rating into the half-open intervals [e_i, e_{i+1})
// and draws n papers with per-bucket quotas that differ by at most one
// across non-empty buckets (short buckets are exhausted and the slack moves
// to the others). Within-bucket choice is uniform under rng.
std::vector<Paper> stratified_sample(const std::vector<Paper>& papers,
                                     const std::vector<double>& interval_edges,
                                     int n, Rng& rng);

// Draws `count` papers without replacement. Returns the selection in draw
// order plus the reduced pool. Throws PoolError("pool exhausted") when the
// pool is too small.
std::pair<std::vector<Paper>, std::vector<Paper>> draw_round_papers(
    std::vector<Paper> pool, int count, Rng& rng);

// Synthetic desk-scale pool: ratings spread over [1, 10], variances under
// the default filter threshold, ground truth Accept iff avg_rating >= 6
// with seeded noise flips at rate 0.1.
std::vector<Paper> generate_synthetic_pool(int n, std::uint64_t seed);

// FNV-1a digest over the canonical JSON of the pool, used to tie a
// transcript to the exact pool it was produced from.
std::uint64_t pool_digest(const std::vector<Paper>& papers);

}  // namespace eloreview
