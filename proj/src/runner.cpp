#include "kvg/runner.hpp"

#include "kvg/corpus.hpp"
#include "kvg/sampling.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace kvg {

namespace {

struct Source {
    std::string name;  // shown in diagnostics and used as a name prefix
    std::string text;
};

std::optional<std::vector<Source>> resolve(const std::string& arg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_regular_file(arg, ec)) {
        std::ifstream in(arg, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return std::vector<Source>{{fs::path(arg).stem().string(), ss.str()}};
    }
    std::string stem = fs::path(arg).filename().string();
    if (stem.size() > 4 && stem.ends_with(".kvs")) stem.resize(stem.size() - 4);
    if (stem == "paper_examples") {
        std::vector<Source> all;
        for (const auto& e : builtin_corpus()) all.push_back({e.name, e.text});
        return all;
    }
    if (const CorpusEntry* e = find_corpus(stem)) return std::vector<Source>{{e->name, e->text}};
    return std::nullopt;
}

std::string rational_list(const RatVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

}  // namespace

std::vector<CheckResult> run_scenario_text(const std::string& text, const CheckContext& ctx, bool fail_fast) {
    Scenario s = parse_scenario(text);
    Model m = build_model(s);
    std::vector<CheckResult> out;
    for (const auto& c : s.checks) {
        out.push_back(run_check(c, m, ctx));
        if (fail_fast && !out.back().as_expected()) break;
    }
    return out;
}

std::vector<std::string> oracle_check(const std::vector<CheckResult>& results, std::uint64_t seed,
                                      std::size_t samples, std::size_t* comparisons) {
    std::vector<std::string> problems;
    std::size_t total = 0;
    for (const auto& r : results)
        for (const auto& g : r.oracle) {
            std::vector<RatVector> pts =
                g.vars.empty() ? std::vector<RatVector>{RatVector{}} : Sampler(seed).points(g.vars.size(), samples);
            std::size_t n = 0;
            try {
                if (auto bad = cross_check(g, pts, &n)) {
                    problems.push_back("oracle disagreement in '" + r.name + "' (" + g.label + " entry " +
                                       std::to_string(bad->entry) + ") at " + rational_list(bad->point) +
                                       ": symbolic " + to_string(bad->symbolic) + ", numeric " +
                                       to_string(bad->numeric));
                }
            } catch (const Error& e) {
                problems.push_back("oracle error in '" + r.name + "' (" + g.label + "): " + e.what());
            }
            total += n;
        }
    if (comparisons) *comparisons = total;
    return problems;
}

RunOutcome run(const RunConfig& config) {
    RunOutcome out;
    std::ostringstream diag;
    std::vector<Source> sources;
    for (const auto& arg : config.scenarios) {
        auto r = resolve(arg);
        if (!r) {
            diag << arg << ": error: no such scenario file or built-in corpus entry\n";
            out.exit_code = 2;
            out.diagnostics = diag.str();
            return out;
        }
        for (auto& s : *r) sources.push_back(std::move(s));
    }
    const bool prefix = sources.size() > 1;
    CheckContext ctx{config.seed, config.samples};
    bool failed = false;
    for (const auto& src : sources) {
        std::vector<CheckResult> results;
        try {
            results = run_scenario_text(src.text, ctx, config.fail_fast);
        } catch (const ParseError& e) {
            diag << src.name << ":" << e.line() << ":" << e.column() << ": parse error: " << e.message();
            if (!e.token().empty()) diag << " near '" << e.token() << "'";
            diag << "\n";
            out.exit_code = 2;
            out.diagnostics = diag.str();
            return out;
        } catch (const SemanticError& e) {
            diag << src.name << ":" << e.line() << ":" << e.column() << ": semantic error: " << e.message() << "\n";
            out.exit_code = 2;
            out.diagnostics = diag.str();
            return out;
        }
        for (auto& r : results) {
            if (prefix) r.name = src.name + "/" + r.name;
            if (!r.as_expected()) failed = true;
            out.results.push_back(std::move(r));
        }
        if (config.fail_fast && failed) break;
    }
    bool disagreement = false;
    if (config.oracle) {
        auto problems = oracle_check(out.results, config.seed, config.samples, &out.oracle_comparisons);
        for (const auto& p : problems) diag << "internal error: " << p << "\n";
        disagreement = !problems.empty();
    }
    out.report = render_report(out.results, config.format);
    out.exit_code = disagreement ? 3 : failed ? 1 : 0;
    out.diagnostics = diag.str();
    return out;
}

std::string list_corpus() {
    std::ostringstream out;
    std::size_t w = 0;
    const std::string all = "paper_examples";
    w = all.size();
    for (const auto& e : builtin_corpus()) w = std::max(w, e.name.size());
    std::string head = all;
    head.resize(w, ' ');
    out << head << "  every scenario below, run in order\n";
    for (const auto& e : builtin_corpus()) {
        std::string name = e.name;
        name.resize(w, ' ');
        out << name << "  " << e.description;
        if (!e.anchor.empty()) out << "  [" << e.anchor << "]";
        out << "\n";
    }
    return out.str();
}

}  // namespace kvg
