#include "kvg/corpus.hpp"

#include <sstream>

namespace kvg {

namespace {

std::string header_value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    const std::string prefix = "# " + key + ":";
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) != 0) continue;
        auto v = line.substr(prefix.size());
        auto b = v.find_first_not_of(' ');
        return b == std::string::npos ? std::string() : v.substr(b);
    }
    return {};
}

}  // namespace

const std::vector<CorpusEntry>& builtin_corpus() {
    static const std::vector<CorpusEntry> entries = [] {
        std::vector<CorpusEntry> out;
        for (const auto& e : detail::embedded_corpus())
            out.push_back({e.name, header_value(e.text, "description"), header_value(e.text, "anchor"), e.text});
        return out;
    }();
    return entries;
}

const CorpusEntry* find_corpus(const std::string& name) {
    std::string stem = name;
    if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".kvs") == 0) stem.resize(stem.size() - 4);
    for (const auto& e : builtin_corpus())
        if (e.name == stem) return &e;
    return nullptr;
}

}  // namespace kvg
