#pragma once

#include "optospring/constants.hpp"

#include <string>
#include <vector>

namespace optospring {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool passed() const;
    std::string format() const;
};

/// Identity and golden-value suite. The constants are injectable so that a
/// perturbed value shows up as a named failure.
ValidationReport run_validation(const Constants& constants = kCodata);

} // namespace optospring
