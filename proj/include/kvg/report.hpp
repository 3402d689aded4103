#pragma once

#include "kvg/dsl.hpp"
#include "kvg/oracle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kvg {

enum class Status { Pass, Fail, PointwisePass, Unsupported };
std::string to_string(Status s);

struct Witness {
    std::vector<std::string> point;  // rationals as "p/q"
    std::string residual;            // surface syntax
};

struct CheckResult {
    std::string name;
    std::string kind;
    Status status = Status::Unsupported;
    std::optional<Witness> witness;
    std::string details;
    Expectation expected = Expectation::Pass;
    /// Residual groups for the numeric cross-check; not part of the report.
    std::vector<OracleGroup> oracle;

    /// pointwise-pass satisfies an expected pass.
    bool as_expected() const;
};

enum class Format { Json, Text };

/// Deterministic rendering: same results, same bytes.
std::string render_report(const std::vector<CheckResult>& results, Format format);

}  // namespace kvg
