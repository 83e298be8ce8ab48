// Command-line front end: validate | solve | simulate | sweep.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "tandem/config.hpp"
#include "tandem/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-stage decentralized multihypothesis sequential tests with maximin quantizers"};
    app.require_subcommand(1, 1);
    app.get_formatter()->column_width(34);

    std::string scenario;
    std::string cost_list;
    tandem::Overrides ov;
    double cost = 0.0;
    std::size_t trials = 10000, grid = 180, block_b = 1, threads = 0;
    std::uint64_t seed = 42, horizon = 10'000'000;
    std::string out, format = "csv", reset = "prior", randomization = "fusion", transcript;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario, "Scenario JSON file (source of truth; flags override)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--cost", cost, "Sampling cost c (default: scenario 'cost')")->check(CLI::PositiveNumber);
        sub->add_option("--cost-list", cost_list, "Comma-separated decreasing costs for sweep")
            ->default_str("1e-2,1e-3,1e-4");
        sub->add_option("--trials", trials, "Monte Carlo trials per true state")
            ->default_val(10000)
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Master random seed")->default_val(42);
        sub->add_option("--out", out, "Output file (default: standard output)");
        sub->add_option("--format", format, "Output format")->default_val("csv")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--grid", grid, "Azimuth grid points for the ULQ search (polar uses grid/2)")
            ->default_val(180)
            ->check(CLI::Range(4, 100000));
        sub->add_option("--reset", reset, "Stage-2 posterior start")
            ->default_val("prior")
            ->check(CLI::IsMember({"prior", "carry"}));
        sub->add_option("--randomization", randomization, "Stage-2 component selection")
            ->default_val("fusion")
            ->check(CLI::IsMember({"fusion", "block"}));
        sub->add_option("--block-b", block_b, "Block length b for block design")
            ->default_val(1)
            ->check(CLI::PositiveNumber);
        sub->add_option("--horizon", horizon, "Per-trial step cap")->default_val(10000000)->check(CLI::PositiveNumber);
        sub->add_option("--transcript", transcript, "JSON-lines transcript of trial 0 per state (simulate)");
        sub->add_option("--threads", threads, "Worker threads, 0 = hardware concurrency")->default_val(0);
    };

    for (const char* name : {"validate", "solve", "simulate", "sweep"}) {
        static const std::map<std::string, std::string> help = {
            {"validate", "Check scenario regularity; exit 1 on any failure"},
            {"solve", "Maximin quantizer for every state (JSON)"},
            {"simulate", "Monte Carlo risk of the two-stage test at the scenario cost"},
            {"sweep", "Monte Carlo risk over a decreasing cost list"}};
        add_common(app.add_subcommand(name, help.at(name)));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const char* flag) { return sub->count(flag) > 0; };
    if (given("--cost")) ov.cost = cost;
    if (given("--trials")) ov.trials = trials;
    if (given("--seed")) ov.seed = seed;
    if (given("--out")) ov.out_path = out;
    if (given("--format")) ov.format = format;
    if (given("--grid")) ov.grid = grid;
    if (given("--reset")) ov.reset = reset;
    if (given("--randomization")) ov.randomization = randomization;
    if (given("--block-b")) ov.block_b = block_b;
    if (given("--horizon")) ov.horizon = horizon;
    if (given("--transcript")) ov.transcript_path = transcript;
    if (given("--threads")) ov.threads = threads;

    try {
        if (given("--cost-list")) ov.cost_list = tandem::parse_cost_list(cost_list);
        const auto pc = tandem::parse_config(scenario, tandem::parse_command(sub->get_name()), ov);
        return tandem::run_command(pc, std::cout, std::cerr);
    } catch (const tandem::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == tandem::ErrorCode::kValidationError ? 1 : 2;
    }
}
