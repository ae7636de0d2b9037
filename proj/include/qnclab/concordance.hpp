#pragma once

#include <string>
#include <vector>

namespace qnclab {

// Machine-checked map from every theory claim this project implements to the
// module, operation, and test that cover it. Rendering fails (and with it
// the build) when a required claim has no entry, so coverage is enforced
// mechanically rather than by review.

struct ConcordanceEntry {
    std::string claim;     // stable key from required_claims()
    std::string statement; // one-line statement of the rule or formula
    std::string module_name;
    std::string operation;
    std::string test_name; // doctest case (or acceptance criterion) exercising it
};

const std::vector<std::string>& required_claims();
const std::vector<ConcordanceEntry>& concordance_registry();

// Claims from `required` with no entry in `registry`; empty means complete.
std::vector<std::string> concordance_gaps(const std::vector<ConcordanceEntry>& registry,
                                          const std::vector<std::string>& required);

// Markdown table; throws InvalidConfigError listing the gaps when incomplete.
std::string render_concordance();

} // namespace qnclab
