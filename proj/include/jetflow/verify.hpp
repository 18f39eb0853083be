#pragma once
// Deterministic self-check battery for a registry entry. Every check
// measures one quantitative property of the constructed geometry against a
// fixed bound: metric identities, frame duality, curvature against the
// entry's recorded profile, structure-equation residuals, trajectory
// residuals, conservation, the energy invariance condition, leaf traces,
// and the variational reconstructions. Grids and sample seeds are fixed so
// two runs over the same entry produce byte-identical reports.

#include <iosfwd>
#include <string>
#include <vector>

#include "jetflow/registry.hpp"

namespace jetflow {

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false; // check not applicable to this entry
    double measured = 0.0;
    double bound = 0.0;
    std::string note;
};

struct VerifyReport {
    std::string entry;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

VerifyReport verify_entry(const RegistryEntry& entry);

// One line per check: "PASS <entry>/<check> measured=<v> bound=<b>[ <note>]"
// with values printed to full precision. Skipped checks print SKIP.
void print_report(std::ostream& out, const VerifyReport& report);

} // namespace jetflow
