#pragma once

#include "kvg/dsl.hpp"
#include "kvg/report.hpp"

#include <cstdint>

namespace kvg {

struct CheckContext {
    std::uint64_t seed = 42;
    std::size_t samples = 20;
};

/// "label" when given, otherwise "kind arg1 arg2 ...".
std::string check_name(const CheckDecl& c);

/// Runs one directive against a built model. Engine errors become status "unsupported";
/// the result carries the residual groups used by the numeric cross-check.
CheckResult run_check(const CheckDecl& c, const Model& m, const CheckContext& ctx);

}  // namespace kvg
