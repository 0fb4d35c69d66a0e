#include "simaudit/domain.hpp"

#include <algorithm>

#include "simaudit/errors.hpp"

namespace simaudit {

namespace {

const std::string kRaceLabels[] = {"White", "Black", "Hispanic", "Asian", "Multiracial"};
const std::string kGenderLabels[] = {"Cis Man", "Cis Woman", "Trans Man", "Trans Woman"};
const std::string kSesLabels[] = {"High", "Middle", "Low"};
const std::string kRelationshipLabels[] = {"Partnered", "Single"};
const std::string kConditionLabels[] = {"clinical", "personal"};
const std::string kInstrumentLabels[] = {"PHQ8", "GAD7", "AUDITC", "PCL5"};
const std::string kSeverityLabels[] = {"None", "Mild", "Moderate", "ModSevere", "Severe"};

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::string (&labels)[N], const char* what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (labels[i] == s) return static_cast<E>(i);
    }
    throw ValidationError(std::string("unknown ") + what + " token \"" + s + "\"");
}

}  // namespace

const std::string& to_label(Race r) { return kRaceLabels[static_cast<std::size_t>(r)]; }
const std::string& to_label(Gender g) { return kGenderLabels[static_cast<std::size_t>(g)]; }
const std::string& to_label(Ses s) { return kSesLabels[static_cast<std::size_t>(s)]; }
const std::string& to_label(Relationship r) { return kRelationshipLabels[static_cast<std::size_t>(r)]; }
const std::string& to_label(Condition c) { return kConditionLabels[static_cast<std::size_t>(c)]; }
const std::string& to_label(InstrumentId id) { return kInstrumentLabels[static_cast<std::size_t>(id)]; }
const std::string& to_label(Severity s) { return kSeverityLabels[static_cast<std::size_t>(s)]; }

Race race_from_label(const std::string& s) { return parse_enum<Race>(s, kRaceLabels, "race"); }
Gender gender_from_label(const std::string& s) { return parse_enum<Gender>(s, kGenderLabels, "gender"); }
Ses ses_from_label(const std::string& s) { return parse_enum<Ses>(s, kSesLabels, "ses"); }
Relationship relationship_from_label(const std::string& s) {
    return parse_enum<Relationship>(s, kRelationshipLabels, "relationship");
}
Condition condition_from_label(const std::string& s) {
    return parse_enum<Condition>(s, kConditionLabels, "condition");
}
InstrumentId instrument_from_label(const std::string& s) {
    return parse_enum<InstrumentId>(s, kInstrumentLabels, "instrument");
}

std::vector<DemographicProfile> all_profiles() {
    std::vector<DemographicProfile> out;
    out.reserve(120);
    for (Race r : kAllRaces)
        for (Gender g : kAllGenders)
            for (Ses s : kAllSes)
                for (Relationship rel : kAllRelationships)
                    out.push_back({r, g, s, rel});
    return out;
}

std::string profile_label(const DemographicProfile& p) {
    return to_label(p.race) + " / " + to_label(p.gender) + " / " + to_label(p.ses) + " / " +
           to_label(p.relationship);
}

const InstrumentSpec& instrument_spec(InstrumentId id) {
    static const InstrumentSpec kSpecs[] = {
        // id, items, min, max, total_max, default_cut, men, women, gendered
        {InstrumentId::PHQ8, 8, 0, 3, 24, 10, 0, 0, false},
        {InstrumentId::GAD7, 7, 0, 3, 21, 10, 0, 0, false},
        {InstrumentId::AUDITC, 3, 0, 4, 12, 0, 4, 3, true},
        {InstrumentId::PCL5, 4, 0, 4, 16, 8, 0, 0, false},
    };
    return kSpecs[static_cast<std::size_t>(id)];
}

InstrumentSpec instrument_spec_with_pcl5_cut(InstrumentId id, int pcl5_cut) {
    InstrumentSpec spec = instrument_spec(id);
    if (id == InstrumentId::PCL5) {
        if (pcl5_cut < 0 || pcl5_cut > spec.total_max) {
            throw ValidationError("PCL5 cut out of range: " + std::to_string(pcl5_cut));
        }
        spec.threshold_default = pcl5_cut;
    }
    return spec;
}

int score_instrument(const std::vector<int>& items, const InstrumentSpec& spec) {
    if (static_cast<int>(items.size()) != spec.item_count) {
        throw ValidationError("item count " + std::to_string(items.size()) + " != " +
                              std::to_string(spec.item_count) + " for " + to_label(spec.id));
    }
    int total = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i] < spec.item_min || items[i] > spec.item_max) {
            throw ValidationError("item " + std::to_string(i + 1) + " value " +
                                  std::to_string(items[i]) + " outside [" +
                                  std::to_string(spec.item_min) + "," +
                                  std::to_string(spec.item_max) + "] for " + to_label(spec.id));
        }
        total += items[i];
    }
    return total;
}

Severity classify_phq8(int total) {
    if (total < 0 || total > 24) {
        throw ValidationError("PHQ8 total out of range: " + std::to_string(total));
    }
    if (total <= 4) return Severity::None;
    if (total <= 9) return Severity::Mild;
    if (total <= 14) return Severity::Moderate;
    if (total <= 19) return Severity::ModSevere;
    return Severity::Severe;
}

bool is_positive(int total, const InstrumentSpec& spec, Gender gender) {
    if (total < 0 || total > spec.total_max) {
        throw ValidationError(to_label(spec.id) + " total out of range: " + std::to_string(total));
    }
    if (spec.gender_dependent_threshold) {
        const bool uses_womens_cut = (gender == Gender::CisWoman || gender == Gender::TransWoman);
        return total >= (uses_womens_cut ? spec.threshold_women : spec.threshold_men);
    }
    return total >= spec.threshold_default;
}

CohortKey cohort_key(const PatientRecord& record) {
    return {record.profile, record.model, record.condition};
}

}  // namespace simaudit
