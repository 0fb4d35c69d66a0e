#pragma once

// Parsing, validation, and indexing of record files, baseline tables,
// and audit configuration.
//
// Wire formats:
//  - Records: JSONL, one object per line with fields exactly
//    {record_id, model, condition, iteration, race, gender, ses,
//     relationship, instrument, items}. condition is "clinical"|"personal";
//    demographic values use the same labels as the baselines table
//    ("White", "Trans Woman", "Low", "Single"); instrument is
//    PHQ8|GAD7|AUDITC|PCL5. Unknown fields are rejected under strict mode
//    and ignored otherwise. An optional "total" field is cross-checked
//    against the item sum and rejected on disagreement.
//  - Baselines: CSV with header dimension,group,instrument,gt_mean,gt_sd,source;
//    an empty gt_sd cell means the population SD is unavailable.
//  - Config: flat "key = value" lines, '#' comments.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simaudit/domain.hpp"

namespace simaudit {

// ============================================================================
// BASELINES
// ============================================================================

enum class Dimension : std::uint8_t { Race, Gender, SES, Relationship, Intersection };

inline constexpr std::array<Dimension, 4> kMarginalDimensions = {
    Dimension::Race, Dimension::Gender, Dimension::SES, Dimension::Relationship};

const std::string& to_label(Dimension d);
Dimension dimension_from_label(const std::string& s);

// Group label of a profile on a marginal dimension ("White", "Low", ...).
// Intersection is not a marginal dimension and is rejected.
const std::string& group_label(const DemographicProfile& p, Dimension dim);

// All group labels of a marginal dimension, in enum order.
std::vector<std::string> dimension_groups(Dimension dim);

struct BaselineRow {
    Dimension dimension = Dimension::Race;
    std::string group;
    InstrumentId instrument = InstrumentId::PHQ8;
    double gt_mean = 0.0;
    std::optional<double> gt_sd;
    std::string source;
};

class BaselineTable {
public:
    BaselineTable() = default;
    explicit BaselineTable(std::vector<BaselineRow> rows) : rows_(std::move(rows)) {}

    const std::vector<BaselineRow>& rows() const { return rows_; }

    // Lookup precedence: exact Intersection row first, then the marginal
    // dimension row. `used_intersection` reports which one matched.
    const BaselineRow* find(Dimension dim, const std::string& group, InstrumentId instrument,
                            bool* used_intersection = nullptr) const;

private:
    std::vector<BaselineRow> rows_;
};

// ============================================================================
// CONFIG
// ============================================================================

enum class WithinRunPairing : std::uint8_t { DisjointConsecutive };
enum class Correction : std::uint8_t { BH, Bonferroni };

struct FamilySpec {
    std::string name;
    Correction correction = Correction::BH;
};

struct AuditConfig {
    double alpha = 0.05;
    int permutation_iterations = 1000;
    std::string reference_group = "White";  // race reference
    std::string reference_gender = "Cis Man";
    std::string reference_ses = "High";
    std::string reference_relationship = "Partnered";
    std::uint64_t rng_seed = 0;
    WithinRunPairing within_run_pairing = WithinRunPairing::DisjointConsecutive;
    std::vector<FamilySpec> families;  // defaulted in report when empty
    std::string records_path;
    std::string baselines_path;
    std::string out_dir;
    bool strict = false;
    int workers = 1;

    double population_baseline = 3.5;  // scalar for intersectional cells
    int pcl5_cut = 8;
    int min_group_n = 30;       // network group floor
    int noise_min_n = 60;       // reference group floor for the noise floor
    int intersect_min_n = 10;   // intersectional cell floor
    int low_n_warning = 30;     // rigidity low-n flag
    int symptom_band = 0;       // 0 = exact total-score strata; 1 widens each stratum by +/-1
    std::vector<std::string> sections;  // empty = all

    void validate() const;  // throws ValidationError
};

// Parse a flat key=value config file; unknown keys are errors.
AuditConfig parse_config(std::istream& in, const std::string& origin = "config");

// ============================================================================
// DATASET
// ============================================================================

struct Provenance {
    std::uint64_t digest = 0;  // FNV-1a over the source bytes
    std::size_t record_count = 0;
};

class Dataset {
public:
    Dataset() = default;
    // Validates uniqueness of record ids and builds the cohort index.
    static Dataset from_records(std::vector<PatientRecord> records, Provenance provenance);

    const std::vector<PatientRecord>& records() const { return records_; }
    const Provenance& provenance() const { return provenance_; }

    using Index = std::map<CohortKey, std::map<InstrumentId, std::vector<std::size_t>>>;
    const Index& index() const { return index_; }

private:
    std::vector<PatientRecord> records_;
    Provenance provenance_;
    Index index_;
};

struct ParseIssue {
    std::size_t line = 0;  // 1-based; 0 when not line-specific
    std::string message;
};

struct ValidationReport {
    std::vector<ParseIssue> issues;
    std::size_t record_count = 0;  // records that parsed cleanly
    std::size_t dropped = 0;       // lines rejected
};

// Strict-fail parser: throws ValidationError (with line number) on the
// first bad line.
Dataset parse_records(std::istream& in, bool strict = false);

// Diagnostic scan: collects every issue instead of throwing.
ValidationReport scan_records(std::istream& in, bool strict = false);

std::vector<BaselineRow> parse_baselines(std::istream& in);

// Canonical JSONL serialization (round-trips through parse_records).
std::string serialize_record(const PatientRecord& record);
std::string serialize_records(const std::vector<PatientRecord>& records);

std::uint64_t fnv1a_digest(const std::string& bytes);

// ============================================================================
// CROSS-RUN MATCHING
// ============================================================================

struct MatchedPairs {
    // Indices into dataset.records(): (clinical, personal), matched on
    // (model, profile, instrument, iteration), canonically ordered.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t unmatched_clinical = 0;
    std::size_t unmatched_personal = 0;
};

MatchedPairs match_cross_run(const Dataset& dataset);

// ============================================================================
// RECORD SELECTION
// ============================================================================

// Conjunction of per-field whitelists; an empty list accepts any value.
struct RecordFilter {
    std::vector<Race> races;
    std::vector<Gender> genders;
    std::vector<Ses> ses;
    std::vector<Relationship> relationships;
    std::vector<std::string> models;
    std::optional<Condition> condition;
    std::optional<InstrumentId> instrument;

    bool matches(const PatientRecord& r) const;
};

}  // namespace simaudit
