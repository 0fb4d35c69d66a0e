#include "simaudit/rigidity.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "simaudit/statkit.hpp"

namespace simaudit {

double stereotype_index(double model_sd, double gt_sd) {
    if (!(model_sd > 0.0) || !(gt_sd > 0.0)) {
        throw std::invalid_argument("stereotype_index: both SDs must be > 0");
    }
    return model_sd / gt_sd;
}

RigidityRow rigidity_row_from_sample(Dimension dim, const std::string& group,
                                     const std::vector<double>& totals,
                                     const BaselineRow* baseline, int low_n_warning) {
    RigidityRow row;
    row.dimension = dim;
    row.group = group;
    row.n = totals.size();

    if (totals.size() < 2) {
        row.flag = "insufficient_n";
        return row;
    }
    row.model_sd = stats::sd_of(totals);
    if (!baseline || !baseline->gt_sd) {
        row.flag = "baseline_unavailable";
        return row;
    }
    row.gt_sd = *baseline->gt_sd;
    if (*row.model_sd <= 0.0) {
        row.flag = "degenerate_sample";
        return row;
    }
    row.si = stereotype_index(*row.model_sd, *row.gt_sd);
    row.compression_pct = (1.0 - *row.si) * 100.0;
    row.p_value = stats::chisq_variance_test({totals, group}, *row.gt_sd).p_value;
    if (static_cast<int>(totals.size()) < low_n_warning) row.flag = "low_n";
    return row;
}

namespace {

// Total scores per (dimension, group [, model]) for one instrument.
using GroupKey = std::tuple<Dimension, std::string, std::string>;  // model "" = pooled

std::map<GroupKey, std::vector<double>> collect_totals(const Dataset& dataset,
                                                       const RigidityOptions& options) {
    std::map<GroupKey, std::vector<double>> out;
    for (const auto& rec : dataset.records()) {
        if (rec.instrument != options.instrument) continue;
        if (options.condition && rec.condition != *options.condition) continue;
        for (Dimension dim : options.dimensions) {
            const std::string& group = group_label(rec.profile, dim);
            const std::string model = options.by_model ? rec.model : std::string();
            out[{dim, group, model}].push_back(static_cast<double>(rec.total));
        }
    }
    return out;
}

}  // namespace

std::vector<RigidityRow> rigidity_table(const Dataset& dataset, const BaselineTable& baselines,
                                        const RigidityOptions& options) {
    const auto groups = collect_totals(dataset, options);
    std::vector<RigidityRow> rows;
    for (const auto& [key, totals] : groups) {
        const auto& [dim, group, model] = key;
        bool used_intersection = false;
        const BaselineRow* baseline =
            baselines.find(dim, group, options.instrument, &used_intersection);
        RigidityRow row =
            rigidity_row_from_sample(dim, group, totals, baseline, options.low_n_warning);
        row.used_intersection_baseline = baseline && used_intersection;
        if (!model.empty()) row.model = model;
        if (options.condition) row.condition = *options.condition;
        rows.push_back(std::move(row));
    }
    // std::map iteration already gives the canonical (dimension, group, model) order.
    return rows;
}

std::vector<ModelSiSummary> per_model_si(const Dataset& dataset, const BaselineTable& baselines,
                                         const RigidityOptions& options) {
    RigidityOptions by_model = options;
    by_model.by_model = true;
    const auto rows = rigidity_table(dataset, baselines, by_model);

    std::map<std::string, std::pair<double, std::size_t>> acc;  // model -> (si sum, count)
    std::set<std::string> models;
    for (const auto& row : rows) {
        if (!row.model) continue;
        models.insert(*row.model);
        if (row.si) {
            auto& [sum, count] = acc[*row.model];
            sum += *row.si;
            ++count;
        }
    }

    std::vector<ModelSiSummary> out;
    for (const auto& model : models) {
        ModelSiSummary s;
        s.model = model;
        const auto it = acc.find(model);
        if (it != acc.end() && it->second.second > 0) {
            s.categories = it->second.second;
            s.mean_si = it->second.first / static_cast<double>(s.categories);
            s.compression_pct = (1.0 - s.mean_si) * 100.0;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ContextSiRow> context_si_delta(const Dataset& dataset, const BaselineTable& baselines,
                                           const RigidityOptions& options) {
    RigidityOptions clinical = options;
    clinical.by_model = false;
    clinical.condition = Condition::Clinical;
    RigidityOptions personal = clinical;
    personal.condition = Condition::Personal;

    const auto clinical_rows = rigidity_table(dataset, baselines, clinical);
    const auto personal_rows = rigidity_table(dataset, baselines, personal);

    auto find_row = [](const std::vector<RigidityRow>& rows, Dimension dim,
                       const std::string& group) -> const RigidityRow* {
        for (const auto& r : rows) {
            if (r.dimension == dim && r.group == group) return &r;
        }
        return nullptr;
    };

    std::vector<ContextSiRow> out;
    for (Dimension dim : options.dimensions) {
        for (const auto& group : dimension_groups(dim)) {
            const RigidityRow* c = find_row(clinical_rows, dim, group);
            const RigidityRow* p = find_row(personal_rows, dim, group);
            if (!c && !p) continue;  // group absent from the dataset entirely
            ContextSiRow row;
            row.dimension = dim;
            row.group = group;
            if (c && c->si) row.si_clinical = c->si;
            if (p && p->si) row.si_personal = p->si;
            if (row.si_clinical && row.si_personal && *row.si_clinical > 0.0) {
                row.pct_change = (*row.si_personal - *row.si_clinical) / *row.si_clinical * 100.0;
            } else {
                row.flag = (!c || !p) ? "missing_condition" : "si_unavailable";
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace simaudit
