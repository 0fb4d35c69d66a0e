#include "simaudit/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "simaudit/errors.hpp"
#include "simaudit/rng.hpp"

namespace simaudit {

namespace {

std::vector<std::size_t> group_record_indices(const Dataset& dataset, Dimension dim,
                                              const std::string& group, InstrumentId instrument) {
    std::vector<std::size_t> out;
    const auto& records = dataset.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.instrument != instrument) continue;
        if (group_label(r.profile, dim) != group) continue;
        out.push_back(i);
    }
    return out;
}

// Correlation matrix over the item columns of the given records.
stats::Matrix matrix_of(const Dataset& dataset, const std::vector<std::size_t>& indices,
                        int item_count) {
    std::vector<stats::Sample> columns(item_count);
    for (int j = 0; j < item_count; ++j) {
        columns[j].values.reserve(indices.size());
        columns[j].label = "item" + std::to_string(j + 1);
    }
    for (std::size_t idx : indices) {
        const auto& items = dataset.records()[idx].items;
        for (int j = 0; j < item_count; ++j) {
            columns[j].values.push_back(static_cast<double>(items[j]));
        }
    }
    return stats::correlation_matrix(columns);
}

bool try_matrix(const Dataset& dataset, const std::vector<std::size_t>& indices, int item_count,
                stats::Matrix& out) {
    try {
        out = matrix_of(dataset, indices, item_count);
        return true;
    } catch (const std::invalid_argument&) {
        return false;  // flat item in this half
    }
}

double percentile95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double h = 0.95 * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace

stats::Matrix group_matrix(const Dataset& dataset, Dimension dim, const std::string& group,
                           InstrumentId instrument, int min_n) {
    const auto indices = group_record_indices(dataset, dim, group, instrument);
    if (static_cast<int>(indices.size()) < min_n) {
        throw InfeasibleError("group_matrix: group \"" + group + "\" has n=" +
                              std::to_string(indices.size()) + " < " + std::to_string(min_n));
    }
    return matrix_of(dataset, indices, instrument_spec(instrument).item_count);
}

NoiseFloor noise_floor(const Dataset& dataset, Dimension dim, const std::string& reference_group,
                       InstrumentId instrument, int iterations, std::uint64_t seed,
                       int min_reference_n, int workers) {
    const auto indices = group_record_indices(dataset, dim, reference_group, instrument);
    const int item_count = instrument_spec(instrument).item_count;
    if (static_cast<int>(indices.size()) < min_reference_n) {
        throw InfeasibleError("noise_floor: reference group \"" + reference_group + "\" has n=" +
                              std::to_string(indices.size()) + " < " +
                              std::to_string(min_reference_n));
    }
    if (iterations < 1) throw ValidationError("noise_floor: iterations must be >= 1");

    const std::size_t half = indices.size() / 2;
    const long long redraw_budget = 10LL * iterations;

    std::vector<double> distances(iterations, 0.0);
    std::vector<long long> redraws(iterations, 0);
    std::vector<std::string> failures(iterations);

    auto run_iteration = [&](int it) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(it)}));
        std::vector<std::size_t> shuffled(indices);
        long long local_redraws = 0;
        for (;;) {
            if (local_redraws > redraw_budget) {
                failures[it] = "noise_floor: iteration " + std::to_string(it) +
                               " exceeded the redraw budget (flat item)";
                return;
            }
            rng.shuffle(shuffled);
            // Odd n: the record at position 2*half is left out this draw.
            const std::vector<std::size_t> a(shuffled.begin(), shuffled.begin() + half);
            const std::vector<std::size_t> b(shuffled.begin() + half, shuffled.begin() + 2 * half);
            stats::Matrix ma, mb;
            if (!try_matrix(dataset, a, item_count, ma) || !try_matrix(dataset, b, item_count, mb)) {
                ++local_redraws;
                continue;
            }
            distances[it] = stats::frobenius_distance(ma, mb);
            redraws[it] = local_redraws;
            return;
        }
    };

    const int thread_count = std::max(1, std::min(workers, iterations));
    if (thread_count == 1) {
        for (int it = 0; it < iterations; ++it) run_iteration(it);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int w = 0; w < thread_count; ++w) {
            pool.emplace_back([&, w] {
                for (int it = w; it < iterations; it += thread_count) run_iteration(it);
            });
        }
        for (auto& t : pool) t.join();
    }

    for (const auto& f : failures) {
        if (!f.empty()) throw InfeasibleError(f);
    }

    NoiseFloor floor;
    floor.iterations = iterations;
    floor.reference_group = reference_group;
    floor.reference_n = indices.size();
    floor.seed = seed;
    floor.redraws = std::accumulate(redraws.begin(), redraws.end(), 0LL);
    if (floor.redraws > redraw_budget) {
        throw InfeasibleError("noise_floor: " + std::to_string(floor.redraws) +
                              " redraws exceeded the budget of " + std::to_string(redraw_budget));
    }
    const double n = static_cast<double>(iterations);
    const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : distances) ss += (d - mean) * (d - mean);
    floor.mean_distance = mean;
    floor.sd_distance = (iterations > 1) ? std::sqrt(ss / (n - 1.0)) : 0.0;
    floor.ceiling95 = percentile95(distances);
    return floor;
}

DivergenceResult divergence(const Dataset& dataset, Dimension dim, const std::string& group,
                            const std::string& reference_group, InstrumentId instrument,
                            const NoiseFloor& floor, int min_n) {
    DivergenceResult out;
    out.group = group;
    out.reference_group = reference_group;
    out.comparison = group + " vs " + reference_group;

    const auto group_idx = group_record_indices(dataset, dim, group, instrument);
    const auto ref_idx = group_record_indices(dataset, dim, reference_group, instrument);
    out.n_group = group_idx.size();
    out.n_reference = ref_idx.size();

    const auto gm = group_matrix(dataset, dim, group, instrument, min_n);
    const auto rm = group_matrix(dataset, dim, reference_group, instrument, min_n);

    out.d_f = stats::frobenius_distance(gm, rm);
    if (floor.sd_distance <= 0.0) {
        throw InfeasibleError("divergence: noise floor has zero spread");
    }
    out.z = (out.d_f - floor.mean_distance) / floor.sd_distance;
    out.p = stats::p_from_z(out.z);
    out.exceeds_ceiling = out.d_f > floor.ceiling95;
    return out;
}

}  // namespace simaudit
