#pragma once

#include "kvg/checks.hpp"
#include "kvg/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kvg {

struct RunConfig {
    /// Files, or built-in corpus names; "paper_examples" expands to the whole corpus.
    std::vector<std::string> scenarios;
    Format format = Format::Json;
    std::uint64_t seed = 42;
    std::size_t samples = 20;
    bool oracle = true;
    bool fail_fast = false;
};

struct RunOutcome {
    /// 0 all as expected, 1 check failure, 2 parse / semantic / input error, 3 oracle disagreement.
    int exit_code = 0;
    std::string report;       // stdout
    std::string diagnostics;  // stderr
    std::vector<CheckResult> results;
    std::size_t oracle_comparisons = 0;
};

RunOutcome run(const RunConfig& config);

/// Parses, builds and runs one scenario text. Throws ParseError / SemanticError.
std::vector<CheckResult> run_scenario_text(const std::string& text, const CheckContext& ctx,
                                           bool fail_fast = false);

/// Cross-checks every residual group of the results; returns the disagreements as messages.
std::vector<std::string> oracle_check(const std::vector<CheckResult>& results, std::uint64_t seed,
                                      std::size_t samples, std::size_t* comparisons = nullptr);

/// Built-in scenario names with descriptions and anchors, one per line.
std::string list_corpus();

}  // namespace kvg
