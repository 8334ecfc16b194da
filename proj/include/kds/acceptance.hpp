#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kds {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    unsigned long seed = 20261018;
    int workers = 0;  ///< 0: hardware concurrency
    std::vector<int> only;  ///< empty: all eight
};

/// One named check per acceptance criterion, tolerances fixed in the source.
/// Domain errors inside a check fail that check and are reported in `detail`.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 zero residue (12.1 s): ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace kds
