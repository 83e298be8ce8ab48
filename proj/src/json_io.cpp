#include "tandem/json_io.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tandem/error.hpp"

namespace tandem {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::kParseError, "field '" + field + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) parse_fail(where + key, "missing");
    return j.at(key);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) parse_fail(field, "expected a number");
    return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
    if (!j.is_array()) parse_fail(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

json endpoint_to_json(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    return x;
}

double endpoint_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        parse_fail("intervals", "unknown endpoint '" + s + "'");
    }
    return number(j, "intervals");
}

json to_json(const DeterministicQuantizer& q) {
    json j = json::object();
    if (q.coefficients()) j["a"] = q.coefficients()->values();
    if (const auto* r = q.region()) {
        json iv = json::array();
        for (const auto& i : r->intervals()) iv.push_back({endpoint_to_json(i.lo), endpoint_to_json(i.hi)});
        j["intervals"] = iv;
        if (auto t = r->lower_threshold()) j["threshold"] = *t;
    } else {
        j["alphabet"] = q.subset()->alphabet;
        j["mask"] = q.subset()->mask;
    }
    return j;
}

json to_json(const RandomizedQuantizer& q) {
    json comps = json::array();
    for (const auto& c : q.components()) comps.push_back(to_json(c));
    return {{"weights", q.weights()}, {"components", comps}};
}

DeterministicQuantizer deterministic_quantizer_from_json(const json& j) {
    std::optional<UlqCoefficients> a;
    if (j.contains("a")) a = UlqCoefficients(numbers(j.at("a"), "a"));
    if (j.contains("intervals")) {
        const json& ivs = j.at("intervals");
        if (!ivs.is_array()) parse_fail("intervals", "expected an array of [lo, hi] pairs");
        std::vector<Interval> out;
        for (const auto& p : ivs) {
            if (!p.is_array() || p.size() != 2) parse_fail("intervals", "expected [lo, hi]");
            out.push_back({endpoint_from_json(p[0]), endpoint_from_json(p[1])});
        }
        return DeterministicQuantizer::from_region(Region(std::move(out)), std::move(a));
    }
    if (j.contains("alphabet")) {
        const auto& m = require(j, "mask", "");
        if (!m.is_number_unsigned()) parse_fail("mask", "expected an unsigned integer");
        return DeterministicQuantizer::from_subset(numbers(j.at("alphabet"), "alphabet"), m.get<std::uint32_t>());
    }
    if (j.contains("threshold")) return DeterministicQuantizer::threshold(number(j.at("threshold"), "threshold"));
    parse_fail("components", "quantizer needs 'intervals', 'alphabet' or 'threshold'");
}

RandomizedQuantizer randomized_quantizer_from_json(const json& j) {
    const auto weights = numbers(require(j, "weights", ""), "weights");
    const json& comps = require(j, "components", "");
    if (!comps.is_array()) parse_fail("components", "expected an array");
    std::vector<DeterministicQuantizer> qs;
    for (const auto& c : comps) qs.push_back(deterministic_quantizer_from_json(c));
    return RandomizedQuantizer(std::move(qs), weights);
}

json to_json(const MaximinSolution& sol) {
    json j = to_json(sol.quantizer);
    j["state"] = sol.state;
    j["value"] = sol.value;
    j["other_states"] = sol.other_states;
    j["pair_divergences"] = sol.pair_divergences;
    j["candidate_count"] = sol.candidate_count;
    j["refinement_iterations"] = sol.refinement_iterations;
    j["degenerate"] = sol.degenerate;
    j["perfect_separation"] = sol.perfect_separation;
    return j;
}

json to_json(const Density& d) {
    if (const auto* g = d.as_gaussian()) return {{"family", "gaussian"}, {"mean", g->mean}, {"stdev", g->stdev}};
    const auto* f = d.as_finite();
    return {{"family", "finite-alphabet"}, {"points", f->points}, {"masses", f->masses}};
}

json to_json(const Scenario& s) {
    json hyps = json::array();
    for (std::size_t m = 0; m < s.size(); ++m) {
        json h = to_json(s.hypotheses[m]);
        h["label"] = s.hypotheses.labels()[m];
        hyps.push_back(h);
    }
    return {{"hypotheses", hyps}, {"loss", s.loss}, {"prior", s.prior}, {"cost", s.cost}};
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) parse_fail("<root>", "expected an object");
    const json& hyps = require(j, "hypotheses", "");
    if (!hyps.is_array() || hyps.size() < 2) parse_fail("hypotheses", "expected an array of at least two entries");

    std::vector<Density> ds;
    std::vector<std::string> labels;
    for (std::size_t m = 0; m < hyps.size(); ++m) {
        const std::string where = "hypotheses[" + std::to_string(m) + "].";
        const json& hj = hyps[m];
        const json& fam = require(hj, "family", where);
        if (!fam.is_string()) parse_fail(where + "family", "expected a string");
        const auto family = fam.get<std::string>();
        try {
            if (family == "gaussian") {
                const double mean = number(require(hj, "mean", where), where + "mean");
                const double sd = hj.contains("stdev") ? number(hj.at("stdev"), where + "stdev") : 1.0;
                ds.push_back(Density::gaussian(mean, sd));
            } else if (family == "finite-alphabet" || family == "finite") {
                ds.push_back(Density::finite_alphabet(numbers(require(hj, "points", where), where + "points"),
                                                      numbers(require(hj, "masses", where), where + "masses")));
            } else {
                parse_fail(where + "family", "unknown family '" + family + "'");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::kParseError) throw;
            throw Error(ErrorCode::kValidationError, where.substr(0, where.size() - 1) + ": " + e.what());
        }
        labels.push_back(hj.contains("label") && hj.at("label").is_string() ? hj.at("label").get<std::string>()
                                                                            : "H" + std::to_string(m));
    }

    const std::size_t m_count = ds.size();
    const json& loss_j = require(j, "loss", "");
    if (!loss_j.is_array()) parse_fail("loss", "expected an MxM array");
    Matrix loss;
    for (std::size_t i = 0; i < loss_j.size(); ++i) loss.push_back(numbers(loss_j[i], "loss[" + std::to_string(i) + "]"));
    bool square = loss.size() == m_count;
    for (const auto& row : loss) square = square && row.size() == m_count;
    if (!square) {
        throw Error(ErrorCode::kValidationError, "field 'loss': must be " + std::to_string(m_count) + "x" +
                                                     std::to_string(m_count));
    }

    auto prior = numbers(require(j, "prior", ""), "prior");
    if (prior.size() != m_count) {
        throw Error(ErrorCode::kValidationError, "field 'prior': has " + std::to_string(prior.size()) +
                                                     " entries, expected M = " + std::to_string(m_count));
    }
    const double cost = number(require(j, "cost", ""), "cost");

    try {
        return Scenario{HypothesisSet(std::move(ds), std::move(labels)), std::move(loss), std::move(prior), cost};
    } catch (const Error& e) {
        throw Error(ErrorCode::kValidationError, std::string("field 'hypotheses': ") + e.what());
    }
}

json to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        const char* st = c.status == CheckStatus::kPass ? "pass" : c.status == CheckStatus::kFail ? "fail" : "warn";
        checks.push_back({{"name", c.name}, {"status", st}, {"detail", c.detail}});
    }
    return {{"ok", r.ok()}, {"checks", checks}};
}

json to_json(const RiskEstimate& r) {
    json states = json::array();
    for (std::size_t m = 0; m < r.per_state.size(); ++m) {
        const auto& s = r.per_state[m];
        states.push_back({{"m", m},
                          {"mean_N", s.mean_n},
                          {"se_N", s.se_n},
                          {"err_prob", s.err_prob},
                          {"se_err", s.se_err},
                          {"errors", s.errors},
                          {"decision_freq", s.decision_freq},
                          {"risk_m", s.risk}});
    }
    return {{"per_state", states}, {"risk_avg", r.average_risk}, {"trials", r.trials}, {"seed", r.seed}};
}

json to_json(const SweepResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr = {{"c", row.c},
                   {"estimate", to_json(row.estimate)},
                   {"theory_risk", row.theory_risk},
                   {"ratio_N", row.ratio_n},
                   {"err_over_c", row.err_over_c}};
        if (row.centralized_risk) jr["centralized_risk"] = *row.centralized_risk;
        rows.push_back(jr);
    }
    return {{"info", r.info}, {"rows", rows}};
}

json to_json(const TranscriptStep& t) {
    return {{"step", t.step}, {"stage", t.stage}, {"component", t.component}, {"bit", t.bit}, {"posterior", t.posterior}};
}

}  // namespace tandem
