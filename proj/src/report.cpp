#include "kvg/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>

namespace kvg {

std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::PointwisePass: return "pointwise-pass";
        case Status::Unsupported: return "unsupported";
    }
    return "unsupported";
}

bool CheckResult::as_expected() const {
    switch (expected) {
        case Expectation::Pass: return status == Status::Pass || status == Status::PointwisePass;
        case Expectation::PointwisePass: return status == Status::PointwisePass;
        case Expectation::Fail: return status == Status::Fail;
        case Expectation::Unsupported: return status == Status::Unsupported;
    }
    return false;
}

namespace {

std::string json_report(const std::vector<CheckResult>& results) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json c;
        c["name"] = r.name;
        c["kind"] = r.kind;
        c["status"] = to_string(r.status);
        if (r.witness) {
            c["witness"] = {{"point", r.witness->point}, {"residual", r.witness->residual}};
        } else {
            c["witness"] = nullptr;
        }
        c["details"] = r.details;
        checks.push_back(std::move(c));
    }
    nlohmann::ordered_json root;
    root["checks"] = std::move(checks);
    return root.dump(2) + "\n";
}

std::string text_report(const std::vector<CheckResult>& results) {
    std::size_t wname = 4, wstatus = 6;
    for (const auto& r : results) {
        wname = std::max(wname, r.name.size());
        wstatus = std::max(wstatus, to_string(r.status).size());
    }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(s.size(), w), ' ');
        return s;
    };
    std::ostringstream out;
    out << pad("STATUS", wstatus) << "  " << pad("NAME", wname) << "  DETAILS\n";
    std::size_t ok = 0;
    for (const auto& r : results) {
        out << pad(to_string(r.status), wstatus) << "  " << pad(r.name, wname) << "  " << r.details << "\n";
        if (r.witness) {
            out << pad("", wstatus) << "  " << pad("", wname) << "  witness: " << r.witness->residual;
            if (!r.witness->point.empty()) {
                out << " at (";
                for (std::size_t i = 0; i < r.witness->point.size(); ++i)
                    out << (i ? ", " : "") << r.witness->point[i];
                out << ")";
            }
            out << "\n";
        }
        ok += r.as_expected();
    }
    out << ok << "/" << results.size() << " checks as expected\n";
    return out.str();
}

}  // namespace

std::string render_report(const std::vector<CheckResult>& results, Format format) {
    return format == Format::Json ? json_report(results) : text_report(results);
}

}  // namespace kvg
