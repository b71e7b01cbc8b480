#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "commands.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/version.hpp"

namespace wheelhouse::cli {

namespace {

using Handler = std::function<int(const Invocation&, Run&, std::ostream&)>;

struct Spec {
    Handler handler;
    bool stochastic = false;
};

void add_common(CLI::App& cmd, Invocation& inv) {
    cmd.add_option("--out", inv.out, "Output directory (default wheelhouse-run)");
    cmd.add_option("--config", inv.config, "Key-value config file")->check(CLI::ExistingFile);
    cmd.add_option("--set", inv.sets, "Override a setting, key=value (repeatable)");
    cmd.add_option("--seed", inv.seed, "Seed for stochastic commands");
    cmd.add_option("--jobs", inv.jobs, "Worker threads for sweeps")->check(CLI::Range(1u, 256u));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Invocation inv;
    std::map<std::string, std::string> named;  // named flags that override settings
    CLI::App app{"Bayesian-network decision support and backtesting for the options wheel strategy", "wheelhouse"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1, 1);

    std::map<std::string, Spec> specs;
    auto sub = [&](const char* name, const char* help, Handler h, bool stochastic) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(*cmd, inv);
        specs[name] = {std::move(h), stochastic};
        return cmd;
    };
    auto setting_flag = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const char* help) {
        cmd->add_option_function<std::string>(flag, [&named, key](const std::string& v) { named[key] = v; }, help);
    };

    auto* ingest = sub("ingest", "Validate and import bar CSVs or trade-record JSONL", cmd_ingest, false);
    ingest->add_option("kind", inv.kind, "bars or trades")->required()->check(CLI::IsMember({"bars", "trades"}));
    ingest->add_option("files", inv.files, "Input files")->required()->check(CLI::ExistingFile);
    ingest->add_option("--ticker", inv.ticker, "Ticker for a single bar file (default: file stem)");
    ingest->add_option("--schema", inv.schema, "Store schema JSON")->check(CLI::ExistingFile);
    setting_flag(ingest, "--holidays", "holidays", "Holiday file, one ISO date per line");

    auto* generate = sub("generate", "Generate a network structure for a market context", cmd_generate, true);
    generate->add_option("--context", inv.context, "Market context JSON")->required()->check(CLI::ExistingFile);
    generate->add_option("--psych", inv.psych, "Psychological state JSON")->check(CLI::ExistingFile);
    generate->add_option("--feedback", inv.feedback, "Feedback JSONL")->check(CLI::ExistingFile);
    setting_flag(generate, "--provider", "llm.provider", "mock or live");

    auto* validate = sub("validate", "Check a structure file", cmd_validate, false);
    validate->add_option("file", inv.files, "Structure JSON")->required()->expected(1)->check(CLI::ExistingFile);

    auto* populate = sub("populate", "Estimate CPTs for a structure from a trade store", cmd_populate, false);
    populate->add_option("--structure", inv.structure, "Structure JSON")->required()->check(CLI::ExistingFile);
    populate->add_option("--store", inv.store, "Trade store JSONL")->required()->check(CLI::ExistingFile);
    populate->add_option("--context", inv.context, "Market context JSON")->required()->check(CLI::ExistingFile);
    populate->add_option("--as-of", inv.as_of, "Decision date (default: the context date)");
    populate->add_option("--schema", inv.schema, "Store schema JSON")->check(CLI::ExistingFile);
    setting_flag(populate, "--holidays", "holidays", "Holiday file");

    auto* infer = sub("infer", "Posterior or trade decision from a network snapshot", cmd_infer, false);
    infer->add_option("--network", inv.network, "Network snapshot JSON")->required()->check(CLI::ExistingFile);
    infer->add_option("--evidence", inv.evidence, "Variable=State (repeatable)");
    infer->add_option("--candidate", inv.candidates, "Candidate OTM[:fraction] (repeatable)");
    infer->add_option("--query", inv.query, "Print this variable's posterior instead of a decision");
    infer->add_flag("--json", inv.json, "Machine-readable output");

    auto* backtest = sub("backtest", "Run the wheel simulation", cmd_backtest, true);
    backtest->add_flag("--walk-forward", inv.walk_forward, "Train/validate/test run with risk-aversion selection");
    for (auto* cmd : {backtest}) {
        setting_flag(cmd, "--data", "data", "Directory of <TICKER>.csv bar files");
        setting_flag(cmd, "--tickers", "tickers", "Comma-separated tickers (default: all files)");
        setting_flag(cmd, "--start", "start", "First simulated date");
        setting_flag(cmd, "--end", "end", "Last simulated date");
        setting_flag(cmd, "--engine", "engine", "bayesian or rule");
        setting_flag(cmd, "--provider", "llm.provider", "mock or live");
    }

    auto* analyze = sub("analyze", "Consistency, ablation, edge impact or sensitivity study", cmd_analyze, true);
    analyze->add_option("kind", inv.kind, "consistency, ablation, impact or sensitivity")
        ->required()
        ->check(CLI::IsMember({"consistency", "ablation", "impact", "sensitivity"}));
    analyze->add_option("--expert", inv.expert, "Expert structure JSON for the ablation")->check(CLI::ExistingFile);
    setting_flag(analyze, "--data", "data", "Directory of <TICKER>.csv bar files");
    setting_flag(analyze, "--tickers", "tickers", "Comma-separated tickers");
    setting_flag(analyze, "--start", "start", "First simulated date");
    setting_flag(analyze, "--end", "end", "Last simulated date");
    setting_flag(analyze, "--provider", "llm.provider", "mock or live");

    auto* report = sub("report", "Render result files as text and CSV tables", cmd_report, false);
    report->add_option("--input", inv.input, "Directory written by backtest or analyze")
        ->required()
        ->check(CLI::ExistingDirectory);

    auto* synth = sub("synth", "Write synthetic GBM bar files", cmd_synth, true);
    setting_flag(synth, "--tickers", "tickers", "Comma-separated tickers (default AAA,BBB,CCC)");
    setting_flag(synth, "--start", "start", "First date");
    setting_flag(synth, "--end", "end", "Last date");

    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    inv.command = chosen->get_name();
    const Spec& spec = specs.at(inv.command);

    std::optional<Run> run;
    try {
        if (inv.config) inv.settings.load_file(*inv.config);
        for (const auto& s : inv.sets) inv.settings.assign(s);
        for (const auto& [k, v] : named) inv.settings.set(k, v);
        if (inv.seed)
            inv.settings.set("seed", std::to_string(*inv.seed));
        else if (inv.settings.has("seed"))
            inv.seed = inv.settings.u64("seed", 0);
        if (spec.stochastic && !inv.seed) throw UsageError(inv.command + " needs --seed (or seed = ... in the config)");
        if (inv.settings.str("llm.provider", "mock") == "live") {
            const char* key = std::getenv("WHEELHOUSE_LLM_KEY");
            if (!key || !*key) throw UsageError("--provider live requires WHEELHOUSE_LLM_KEY");
        }

        run.emplace(inv.out, inv.command, inv.settings, inv.seed);
        for (const auto& p : command_inputs(inv)) run->input(p);
        run->start();
        const int code = spec.handler(inv, *run, out);
        run->finish(code == 0);
        return code;
    } catch (const UsageError& e) {
        if (run) run->finish(false);
        err << "usage error: " << e.what() << "\n" << chosen->help();
        return 2;
    } catch (const std::exception& e) {
        if (run) run->finish(false);
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace wheelhouse::cli
