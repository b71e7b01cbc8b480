#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run.hpp"
#include "settings.hpp"

namespace wheelhouse::cli {

struct Invocation {
    std::string command;
    std::filesystem::path out = "wheelhouse-run";
    std::optional<std::filesystem::path> config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool json = false;

    std::string kind;  // ingest: bars|trades; analyze: consistency|ablation|impact|sensitivity
    std::vector<std::filesystem::path> files;
    std::string context, psych, feedback, structure, store, schema, network, input, expert, ticker, as_of, query;
    std::vector<std::string> evidence;
    std::vector<std::string> candidates;
    bool walk_forward = false;

    Settings settings;  // config file, then --set, then named flags
};

// Paths the command reads, hashed into the manifest.
std::vector<std::filesystem::path> command_inputs(const Invocation& inv);

int cmd_ingest(const Invocation& inv, Run& run, std::ostream& out);
int cmd_generate(const Invocation& inv, Run& run, std::ostream& out);
int cmd_validate(const Invocation& inv, Run& run, std::ostream& out);
int cmd_populate(const Invocation& inv, Run& run, std::ostream& out);
int cmd_infer(const Invocation& inv, Run& run, std::ostream& out);
int cmd_backtest(const Invocation& inv, Run& run, std::ostream& out);
int cmd_analyze(const Invocation& inv, Run& run, std::ostream& out);
int cmd_report(const Invocation& inv, Run& run, std::ostream& out);
int cmd_synth(const Invocation& inv, Run& run, std::ostream& out);

}  // namespace wheelhouse::cli
