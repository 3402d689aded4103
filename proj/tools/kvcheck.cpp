// kvcheck: run Koszul-Vinberg scenario files and print a report.
#include "kvg/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Exact verification of Koszul-Vinberg scenarios"};
    kvg::RunConfig config;
    std::string format = "json";
    bool no_oracle = false;
    bool list = false;
    app.add_option("--scenario", config.scenarios, "scenario file or built-in corpus name")->expected(1, -1);
    app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--seed", config.seed, "sampling seed");
    app.add_option("--samples", config.samples, "sample points per residual")->check(CLI::PositiveNumber);
    app.add_flag("--no-oracle", no_oracle, "skip the numeric cross-check");
    app.add_flag("--fail-fast", config.fail_fast, "stop at the first unexpected result");
    app.add_flag("--list-corpus", list, "list built-in scenarios");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (list) {
        std::cout << kvg::list_corpus();
        return 0;
    }
    config.format = format == "text" ? kvg::Format::Text : kvg::Format::Json;
    config.oracle = !no_oracle;
    kvg::RunOutcome out = kvg::run(config);
    std::cout << out.report;
    std::cerr << out.diagnostics;
    return out.exit_code;
}
