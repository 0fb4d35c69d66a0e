#include "simaudit/logic.hpp"

namespace simaudit {

LogicAuditResult gateway_violations(const Dataset& dataset) {
    LogicAuditResult out;
    for (const auto& r : dataset.records()) {
        if (r.instrument != InstrumentId::PHQ8) continue;
        ++out.audited;
        const int item1 = r.items[0];
        const int item2 = r.items[1];
        if (r.total >= 10 && item1 <= 1 && item2 <= 1) {
            out.violations.push_back({r.record_id, r.total, item1, item2});
        }
    }
    out.count = out.violations.size();
    out.rate = (out.audited == 0) ? 0.0
                                  : static_cast<double>(out.count) / static_cast<double>(out.audited);
    return out;
}

}  // namespace simaudit
