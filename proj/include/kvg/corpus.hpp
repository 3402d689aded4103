#pragma once

#include <string>
#include <vector>

namespace kvg {

struct EmbeddedScenario {
    const char* name;
    const char* text;
};

/// A built-in scenario with the metadata read from its "# description:" and "# anchor:" lines.
struct CorpusEntry {
    std::string name;
    std::string description;
    std::string anchor;
    std::string text;
};

const std::vector<CorpusEntry>& builtin_corpus();
/// nullptr when no built-in scenario has that name (with or without ".kvs").
const CorpusEntry* find_corpus(const std::string& name);

namespace detail {
const std::vector<EmbeddedScenario>& embedded_corpus();
}

}  // namespace kvg
