#pragma once

// Core vocabulary: demographic profiles, screening instruments, scoring,
// and severity classification.

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace simaudit {

// ============================================================================
// DEMOGRAPHICS
// ============================================================================

enum class Race : std::uint8_t { White, Black, Hispanic, Asian, Multiracial };
enum class Gender : std::uint8_t { CisMan, CisWoman, TransMan, TransWoman };
enum class Ses : std::uint8_t { High, Middle, Low };
enum class Relationship : std::uint8_t { Partnered, Single };
enum class Condition : std::uint8_t { Clinical, Personal };

inline constexpr std::array<Race, 5> kAllRaces = {Race::White, Race::Black, Race::Hispanic,
                                                  Race::Asian, Race::Multiracial};
inline constexpr std::array<Gender, 4> kAllGenders = {Gender::CisMan, Gender::CisWoman,
                                                      Gender::TransMan, Gender::TransWoman};
inline constexpr std::array<Ses, 3> kAllSes = {Ses::High, Ses::Middle, Ses::Low};
inline constexpr std::array<Relationship, 2> kAllRelationships = {Relationship::Partnered,
                                                                  Relationship::Single};
inline constexpr std::array<Condition, 2> kAllConditions = {Condition::Clinical,
                                                            Condition::Personal};

const std::string& to_label(Race r);
const std::string& to_label(Gender g);
const std::string& to_label(Ses s);
const std::string& to_label(Relationship r);
const std::string& to_label(Condition c);

// Token parsers; throw ValidationError on unknown tokens.
Race race_from_label(const std::string& s);
Gender gender_from_label(const std::string& s);
Ses ses_from_label(const std::string& s);
Relationship relationship_from_label(const std::string& s);
Condition condition_from_label(const std::string& s);

struct DemographicProfile {
    Race race = Race::White;
    Gender gender = Gender::CisMan;
    Ses ses = Ses::High;
    Relationship relationship = Relationship::Partnered;

    auto operator<=>(const DemographicProfile&) const = default;
};

// All 120 profiles in canonical (enum-ordinal) order.
std::vector<DemographicProfile> all_profiles();

// Human-readable "White / Cis Man / High / Partnered".
std::string profile_label(const DemographicProfile& p);

// ============================================================================
// INSTRUMENTS
// ============================================================================

enum class InstrumentId : std::uint8_t { PHQ8, GAD7, AUDITC, PCL5 };

inline constexpr std::array<InstrumentId, 4> kAllInstruments = {
    InstrumentId::PHQ8, InstrumentId::GAD7, InstrumentId::AUDITC, InstrumentId::PCL5};

const std::string& to_label(InstrumentId id);
InstrumentId instrument_from_label(const std::string& s);

struct InstrumentSpec {
    InstrumentId id = InstrumentId::PHQ8;
    int item_count = 0;
    int item_min = 0;
    int item_max = 0;
    int total_max = 0;
    // Screening cut: total >= threshold flags positive. AUDIT-C is
    // gender-dependent; all others use threshold_default for everyone.
    int threshold_default = 0;
    int threshold_men = 0;    // AUDIT-C only
    int threshold_women = 0;  // AUDIT-C only
    bool gender_dependent_threshold = false;
};

// Built-in registry. The PCL-5 screening cut is not standardized for the
// abbreviated 4-item form; pcl5_cut overrides the default of 8.
const InstrumentSpec& instrument_spec(InstrumentId id);
InstrumentSpec instrument_spec_with_pcl5_cut(InstrumentId id, int pcl5_cut);

// ============================================================================
// RECORDS
// ============================================================================

struct PatientRecord {
    std::string record_id;
    std::string model;
    Condition condition = Condition::Clinical;
    int iteration = 0;  // 1-based
    DemographicProfile profile;
    InstrumentId instrument = InstrumentId::PHQ8;
    std::vector<int> items;
    int total = 0;  // always recomputed from items
};

struct CohortKey {
    DemographicProfile profile;
    std::string model;
    Condition condition = Condition::Clinical;

    // Canonical ordering: profile enum ordinals, then model name, then condition.
    auto operator<=>(const CohortKey&) const = default;
};

// ============================================================================
// SEVERITY
// ============================================================================

enum class Severity : std::uint8_t { None, Mild, Moderate, ModSevere, Severe };

inline constexpr std::array<Severity, 5> kAllSeverities = {
    Severity::None, Severity::Mild, Severity::Moderate, Severity::ModSevere, Severity::Severe};

const std::string& to_label(Severity s);

// ============================================================================
// OPERATIONS
// ============================================================================

// Validates length and bounds, returns the item sum.
// Throws ValidationError naming the offending index on a bounds violation.
int score_instrument(const std::vector<int>& items, const InstrumentSpec& spec);

// PHQ-8 severity bands: 0-4 / 5-9 / 10-14 / 15-19 / 20-24.
Severity classify_phq8(int total);

// Screening decision; gender matters only for AUDIT-C (identity-concordant
// cuts: trans women use the women's threshold, trans men the men's).
bool is_positive(int total, const InstrumentSpec& spec, Gender gender);

CohortKey cohort_key(const PatientRecord& record);

}  // namespace simaudit
