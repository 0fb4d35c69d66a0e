#pragma once

// Symptom-network divergence: per-group item correlation matrices, Frobenius
// distances against a reference group, and a permutation noise floor from
// split-half resampling within the reference group.

#include <cstdint>
#include <string>
#include <vector>

#include "simaudit/ingest.hpp"
#include "simaudit/statkit.hpp"

namespace simaudit {

struct NoiseFloor {
    int iterations = 0;
    std::string reference_group;
    std::size_t reference_n = 0;
    double mean_distance = 0.0;
    double sd_distance = 0.0;
    double ceiling95 = 0.0;  // 95th percentile, linear-interpolation quantile
    std::uint64_t seed = 0;
    long long redraws = 0;   // iterations redrawn because a half had a flat item
};

struct DivergenceResult {
    std::string comparison;  // "<group> vs <reference>"
    std::string group;
    std::string reference_group;
    double d_f = 0.0;
    double z = 0.0;
    double p = 1.0;
    bool exceeds_ceiling = false;
    std::size_t n_group = 0;
    std::size_t n_reference = 0;
};

// Item correlation matrix over all of a group's records for one instrument.
// Throws InfeasibleError below min_n; propagates the zero-variance-item error.
stats::Matrix group_matrix(const Dataset& dataset, Dimension dim, const std::string& group,
                           InstrumentId instrument, int min_n);

// Split-half noise floor within the reference group. Each iteration
// bipartitions the group's records into disjoint equal halves (odd n drops
// one record at random), computes both half matrices, and records their
// Frobenius distance. Iterations with a flat item in either half are redrawn
// so the iteration count stays exact; more than 10x iterations redraws abort.
// Per-iteration sub-seeds make the result independent of worker count.
NoiseFloor noise_floor(const Dataset& dataset, Dimension dim, const std::string& reference_group,
                       InstrumentId instrument, int iterations, std::uint64_t seed,
                       int min_reference_n, int workers = 1);

DivergenceResult divergence(const Dataset& dataset, Dimension dim, const std::string& group,
                            const std::string& reference_group, InstrumentId instrument,
                            const NoiseFloor& floor, int min_n);

}  // namespace simaudit
