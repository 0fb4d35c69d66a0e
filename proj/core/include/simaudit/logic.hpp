#pragma once

// Gateway coherence check over every PHQ-8 record: a moderate-or-worse total
// (>= 10) must come with depressed mood (item 1) or anhedonia (item 2)
// scored 2 or higher.

#include <string>
#include <vector>

#include "simaudit/ingest.hpp"

namespace simaudit {

struct LogicViolation {
    std::string record_id;
    int total = 0;
    int item1 = 0;
    int item2 = 0;
};

struct LogicAuditResult {
    std::size_t audited = 0;  // PHQ8 records examined
    std::size_t count = 0;
    double rate = 0.0;
    std::vector<LogicViolation> violations;
};

LogicAuditResult gateway_violations(const Dataset& dataset);

}  // namespace simaudit
