#include "tandem/config.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "tandem/error.hpp"
#include "tandem/json_io.hpp"
#include "tandem/maximin.hpp"
#include "tandem/montecarlo.hpp"
#include "tandem/random.hpp"
#include "tandem/two_stage.hpp"

namespace tandem {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::kValidationError, "field '" + field + "': " + what);
}

ResetPolicy parse_reset(const std::string& v) {
    if (v == "prior") return ResetPolicy::kResetToPrior;
    if (v == "carry") return ResetPolicy::kCarryOver;
    invalid("reset", "expected prior|carry, got '" + v + "'");
}

RandomizationMode parse_randomization(const std::string& v) {
    if (v == "fusion") return RandomizationMode::kFusionDriven;
    if (v == "block") return RandomizationMode::kBlockDesign;
    invalid("randomization", "expected fusion|block, got '" + v + "'");
}

template <typename T>
T positive_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) invalid(field, "expected a positive integer");
    return j.get<T>();
}

void apply_run_block(const json& run, RunConfig& cfg) {
    if (!run.is_object()) invalid("run", "expected an object");
    try {
        if (run.contains("cost_list")) cfg.cost_list = run.at("cost_list").get<std::vector<double>>();
        if (run.contains("trials")) cfg.trials = positive_integer<std::size_t>(run.at("trials"), "run.trials");
        if (run.contains("seed")) cfg.seed = run.at("seed").get<std::uint64_t>();
        if (run.contains("out")) cfg.out_path = run.at("out").get<std::string>();
        if (run.contains("format")) cfg.format = run.at("format").get<std::string>();
        if (run.contains("grid")) cfg.grid = positive_integer<std::size_t>(run.at("grid"), "run.grid");
        if (run.contains("reset")) cfg.reset = parse_reset(run.at("reset").get<std::string>());
        if (run.contains("randomization")) cfg.randomization = parse_randomization(run.at("randomization").get<std::string>());
        if (run.contains("block_b")) cfg.block_b = positive_integer<std::size_t>(run.at("block_b"), "run.block_b");
        if (run.contains("horizon")) cfg.horizon = positive_integer<std::uint64_t>(run.at("horizon"), "run.horizon");
        if (run.contains("transcript")) cfg.transcript_path = run.at("transcript").get<std::string>();
        if (run.contains("centralized_constant")) cfg.centralized_constant = run.at("centralized_constant").get<double>();
        if (run.contains("threads")) cfg.threads = run.at("threads").get<std::size_t>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("field 'run': ") + e.what());
    }
}

void check_run_config(const RunConfig& cfg) {
    if (cfg.cost_list.empty()) invalid("cost_list", "must not be empty");
    for (double c : cfg.cost_list) {
        if (!(c > 0.0)) invalid("cost_list", "every cost must be positive");
    }
    if (cfg.trials == 0) invalid("trials", "must be positive");
    if (cfg.grid < 4) invalid("grid", "must be at least 4");
    if (cfg.block_b == 0) invalid("block_b", "must be positive");
    if (cfg.horizon == 0) invalid("horizon", "must be positive");
    if (cfg.format != "csv" && cfg.format != "json") invalid("format", "expected csv|json");
    if (cfg.centralized_constant && !(*cfg.centralized_constant > 0.0)) {
        invalid("centralized_constant", "must be positive");
    }
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + cfg.out_path);
    f << text;
}

MaximinConfig maximin_config(const RunConfig& cfg) {
    MaximinConfig mc;
    mc.grid.azimuth_points = cfg.grid;
    mc.grid.polar_points = std::max<std::size_t>(2, cfg.grid / 2);
    mc.grid.threads = cfg.threads;
    return mc;
}

EngineOptions engine_options(const RunConfig& cfg) {
    EngineOptions opt;
    opt.reset = cfg.reset;
    opt.randomization = cfg.randomization;
    opt.block_b = cfg.block_b;
    opt.horizon = cfg.horizon;
    return opt;
}

std::string csv_with_header(const json& header, const std::string& body) {
    return "# config: " + header.dump() + "\n" + body;
}

void write_transcripts(const ParsedConfig& pc, const TestSpec& base) {
    const RunConfig& cfg = pc.run;
    EngineOptions opt = base.options();
    opt.record_transcript = true;
    std::vector<RandomizedQuantizer> stage2;
    for (std::size_t m = 0; m < base.size(); ++m) stage2.push_back(base.stage2(m));
    const TestSpec spec(base.hypotheses(), base.stage1(), std::move(stage2), opt);

    std::ofstream f(cfg.transcript_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + cfg.transcript_path);
    for (std::size_t m = 0; m < spec.size(); ++m) {
        // Same stream as trial 0 of state m in estimate_risk.
        const TrialOutcome o = run_trial(spec, pc.scenario, m, derive_seed(cfg.seed, m, 0));
        for (const auto& step : o.transcript) {
            json line = to_json(step);
            line["true_state"] = m;
            f << line.dump() << "\n";
        }
    }
}

}  // namespace

Command parse_command(const std::string& name) {
    if (name == "validate") return Command::kValidate;
    if (name == "solve") return Command::kSolve;
    if (name == "simulate") return Command::kSimulate;
    if (name == "sweep") return Command::kSweep;
    throw Error(ErrorCode::kParseError, "unknown command '" + name + "'");
}

std::string command_name(Command c) {
    switch (c) {
        case Command::kValidate: return "validate";
        case Command::kSolve: return "solve";
        case Command::kSimulate: return "simulate";
        case Command::kSweep: return "sweep";
    }
    return "?";
}

std::vector<double> parse_cost_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::kParseError, "field 'cost-list': cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw Error(ErrorCode::kParseError, "field 'cost-list': empty");
    return out;
}

ParsedConfig parse_config_json(const json& doc, Command command, const Overrides& ov) {
    Scenario scenario = scenario_from_json(doc);
    RunConfig cfg;
    cfg.command = command;
    if (doc.contains("run")) apply_run_block(doc.at("run"), cfg);

    if (ov.cost) scenario.cost = *ov.cost;
    if (ov.cost_list) cfg.cost_list = *ov.cost_list;
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out_path) cfg.out_path = *ov.out_path;
    if (ov.format) cfg.format = *ov.format;
    if (ov.grid) cfg.grid = *ov.grid;
    if (ov.reset) cfg.reset = parse_reset(*ov.reset);
    if (ov.randomization) cfg.randomization = parse_randomization(*ov.randomization);
    if (ov.block_b) cfg.block_b = *ov.block_b;
    if (ov.horizon) cfg.horizon = *ov.horizon;
    if (ov.transcript_path) cfg.transcript_path = *ov.transcript_path;
    if (ov.threads) cfg.threads = *ov.threads;
    check_run_config(cfg);
    return {std::move(cfg), std::move(scenario)};
}

ParsedConfig parse_config(const std::string& path, Command command, const Overrides& overrides) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::kParseError, "cannot open scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kParseError, path + ": " + e.what());
    }
    ParsedConfig pc = parse_config_json(doc, command, overrides);
    pc.run.scenario_path = path;
    return pc;
}

json to_json(const RunConfig& cfg) {
    json j = {{"command", command_name(cfg.command)},
              {"scenario", cfg.scenario_path},
              {"cost_list", cfg.cost_list},
              {"trials", cfg.trials},
              {"seed", cfg.seed},
              {"out", cfg.out_path},
              {"format", cfg.format},
              {"grid", cfg.grid},
              {"reset", cfg.reset == ResetPolicy::kResetToPrior ? "prior" : "carry"},
              {"randomization", cfg.randomization == RandomizationMode::kFusionDriven ? "fusion" : "block"},
              {"block_b", cfg.block_b},
              {"horizon", cfg.horizon},
              {"transcript", cfg.transcript_path}};
    j["centralized_constant"] = cfg.centralized_constant ? json(*cfg.centralized_constant) : json(nullptr);
    return j;
}

int run_command(const ParsedConfig& pc, std::ostream& out, std::ostream& err) {
    const RunConfig& cfg = pc.run;
    const Scenario& s = pc.scenario;
    try {
        const ValidationReport report = validate_scenario(s);
        json header = {{"config", to_json(cfg)}, {"scenario", to_json(s)}};

        if (cfg.command == Command::kValidate) {
            if (cfg.format == "json") {
                header["report"] = to_json(report);
                emit(cfg, header.dump(2) + "\n", out);
            } else {
                emit(cfg, report.to_string(), out);
            }
            return report.ok() ? 0 : 1;
        }
        if (!report.ok()) {
            err << "scenario failed validation:\n" << report.to_string();
            return 1;
        }

        const auto solutions = solve_all_states(s.hypotheses, maximin_config(cfg));
        if (cfg.command == Command::kSolve) {
            json sols = json::array();
            for (const auto& sol : solutions) sols.push_back(to_json(sol));
            header["solutions"] = sols;
            emit(cfg, header.dump(2) + "\n", out);
            return 0;
        }

        const TestSpec spec = make_maximin_spec(s.hypotheses, solutions, engine_options(cfg));
        header["stage1"] = to_json(spec.stage1());
        if (cfg.command == Command::kSimulate) {
            SweepResult result;
            for (std::size_t m = 0; m < s.size(); ++m) result.info.push_back(info_number(spec.stage2(m), s.hypotheses, m));
            result.rows.push_back(summarize(spec, s, estimate_risk(spec, s, cfg.trials, cfg.seed, cfg.threads),
                                            cfg.centralized_constant));
            if (!cfg.transcript_path.empty()) write_transcripts(pc, spec);
            if (cfg.format == "json") {
                header["result"] = to_json(result);
                emit(cfg, header.dump(2) + "\n", out);
            } else {
                emit(cfg, csv_with_header(header, sweep_csv(result)), out);
            }
            return 0;
        }

        const SweepResult result = sweep([&](double) { return spec; }, cfg.cost_list, s, cfg.trials, cfg.seed,
                                         cfg.centralized_constant, cfg.threads);
        if (cfg.format == "json") {
            header["result"] = to_json(result);
            emit(cfg, header.dump(2) + "\n", out);
        } else {
            emit(cfg, csv_with_header(header, sweep_csv(result)), out);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::kValidationError ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace tandem
