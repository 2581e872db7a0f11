// validate.hpp - Cross-module invariant suite, run at the three canonical
// parameter sets (detuning-sweep, thermal, delayed-coincidence).

#pragma once

#include "omsim/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace omsim {

struct ValidationOptions {
    std::optional<std::array<int, 3>> dims_override;
    std::optional<double> omega_override;
    bool allow_strong_drive{false};
};

struct ValidationCheck {
    std::string name;
    bool passed{false};
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }
};

ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace omsim
