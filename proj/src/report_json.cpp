// SPDX-License-Identifier: MIT
#include "chaosbound/report_json.hpp"

#include "chaosbound/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace chaosbound {

namespace {

Json number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double read_number(const Json& j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    throw InvalidInput("report: expected a number, got " + j.dump());
}

Json numbers(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) {
        out.push_back(number(x));
    }
    return out;
}

std::vector<double> read_numbers(const Json& j) {
    std::vector<double> out;
    for (const auto& x : j) {
        out.push_back(read_number(x));
    }
    return out;
}

NormStatus parse_status(const std::string& s) {
    for (auto st : {NormStatus::exact, NormStatus::certified_oracle, NormStatus::local_search_lower_bound}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw InvalidInput("report: unknown status '" + s + "'");
}

Regime parse_regime(const std::string& s) {
    for (auto r : {Regime::general_d_le_3, Regime::exponential_any_d, Regime::heuristic}) {
        if (to_string(r) == s) {
            return r;
        }
    }
    throw InvalidInput("report: unknown regime '" + s + "'");
}

template <class T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw InvalidInput(std::string("report: missing field '") + key + "'");
    }
    return j.at(key).get<T>();
}

double number_field(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw InvalidInput(std::string("report: missing field '") + key + "'");
    }
    return read_number(j.at(key));
}

}  // namespace

Json to_json(const NormValue& v) {
    return Json{{"value", number(v.value)},
                {"status", to_string(v.status)},
                {"iterations", v.diagnostics.iterations},
                {"restarts", v.diagnostics.restarts},
                {"best_start", v.diagnostics.best_start},
                {"duality_gap", number(v.diagnostics.duality_gap)},
                {"error_bound", number(v.diagnostics.error_bound)}};
}

NormValue norm_value_from_json(const Json& j) {
    NormValue v;
    v.value = number_field(j, "value");
    v.status = parse_status(field<std::string>(j, "status"));
    v.diagnostics.iterations = field<int>(j, "iterations");
    v.diagnostics.restarts = field<int>(j, "restarts");
    v.diagnostics.best_start = field<int>(j, "best_start");
    v.diagnostics.duality_gap = number_field(j, "duality_gap");
    v.diagnostics.error_bound = number_field(j, "error_bound");
    return v;
}

Json to_json(const MomentEstimate& m) {
    return Json{{"p", number(m.p)},
                {"estimate", number(m.estimate)},
                {"half_width", number(m.half_width)},
                {"samples", m.samples},
                {"shards", m.shards}};
}

MomentEstimate moment_from_json(const Json& j) {
    MomentEstimate m;
    m.p = number_field(j, "p");
    m.estimate = number_field(j, "estimate");
    m.half_width = number_field(j, "half_width");
    m.samples = field<std::size_t>(j, "samples");
    m.shards = field<std::size_t>(j, "shards");
    return m;
}

Json to_json(const TailEstimate& t) {
    return Json{{"threshold", number(t.threshold)},
                {"probability", number(t.probability)},
                {"lower", number(t.lower)},
                {"upper", number(t.upper)},
                {"hits", t.hits},
                {"samples", t.samples}};
}

TailEstimate tail_estimate_from_json(const Json& j) {
    TailEstimate t;
    t.threshold = number_field(j, "threshold");
    t.probability = number_field(j, "probability");
    t.lower = number_field(j, "lower");
    t.upper = number_field(j, "upper");
    t.hits = field<std::size_t>(j, "hits");
    t.samples = field<std::size_t>(j, "samples");
    return t;
}

Json to_json(const BoundReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json terms = Json::array();
        for (const auto& term : row.bound.terms) {
            Json t = to_json(term.norm);
            t["partition"] = term.partition.text();
            terms.push_back(std::move(t));
        }
        rows.push_back(Json{{"p", number(row.p)},
                            {"partitions", std::move(terms)},
                            {"total", number(row.bound.total)},
                            {"status", to_string(row.bound.status)},
                            {"moment", to_json(row.moment)},
                            {"ratio", number(row.ratio)},
                            {"within", row.within},
                            {"lower_ok", row.lower_ok},
                            {"upper_ok", row.upper_ok},
                            {"error", row.error}});
    }
    Json out{{"kind", "bound"},
             {"description", r.description},
             {"dims", r.dims},
             {"dists", r.dists},
             {"p_grid", numbers(r.p_grid)},
             {"regime", to_string(r.regime)},
             {"theorem_backed", r.theorem_backed},
             {"acceptance", number(r.acceptance)},
             {"seed", r.seed},
             {"samples", r.samples},
             {"shards", r.shards},
             {"degenerate", r.degenerate},
             {"passed", r.passed},
             {"rows", std::move(rows)}};
    if (r.timing_seconds) {
        out["timing_seconds"] = *r.timing_seconds;
    }
    return out;
}

BoundReport bound_report_from_json(const Json& j) {
    BoundReport r;
    r.description = field<std::string>(j, "description");
    r.dims = field<std::vector<std::size_t>>(j, "dims");
    r.dists = field<std::string>(j, "dists");
    r.p_grid = read_numbers(j.at("p_grid"));
    r.regime = parse_regime(field<std::string>(j, "regime"));
    r.theorem_backed = field<bool>(j, "theorem_backed");
    r.acceptance = number_field(j, "acceptance");
    r.seed = field<std::uint64_t>(j, "seed");
    r.samples = field<std::size_t>(j, "samples");
    r.shards = field<std::size_t>(j, "shards");
    r.degenerate = field<bool>(j, "degenerate");
    r.passed = field<bool>(j, "passed");
    if (j.contains("timing_seconds")) {
        r.timing_seconds = j.at("timing_seconds").get<double>();
    }
    const int d = static_cast<int>(r.dims.size());
    for (const auto& jr : j.at("rows")) {
        MomentRow row;
        row.p = number_field(jr, "p");
        for (const auto& jt : jr.at("partitions")) {
            row.bound.terms.push_back(
                PartitionNorm{parse_partition(field<std::string>(jt, "partition"), d), norm_value_from_json(jt)});
        }
        row.bound.total = number_field(jr, "total");
        row.bound.status = parse_status(field<std::string>(jr, "status"));
        row.bound.regime = r.regime;
        row.moment = moment_from_json(jr.at("moment"));
        row.ratio = number_field(jr, "ratio");
        row.within = field<bool>(jr, "within");
        row.lower_ok = field<bool>(jr, "lower_ok");
        row.upper_ok = field<bool>(jr, "upper_ok");
        row.error = field<std::string>(jr, "error");
        r.rows.push_back(std::move(row));
    }
    return r;
}

Json to_json(const TailReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"t", number(row.t)},
                            {"level", number(row.level)},
                            {"clamped", row.clamped},
                            {"threshold", number(row.threshold)},
                            {"tail", to_json(row.tail)},
                            {"insufficient", row.insufficient},
                            {"fit_lower", number(row.fit_lower)},
                            {"fit_upper", number(row.fit_upper)},
                            {"error", row.error}});
    }
    Json out{{"kind", "tail"},
             {"description", r.description},
             {"dims", r.dims},
             {"dists", r.dists},
             {"t_grid", numbers(r.t_grid)},
             {"regime", to_string(r.regime)},
             {"fitted_lower", number(r.fitted_lower)},
             {"fitted_upper", number(r.fitted_upper)},
             {"fitted", number(r.fitted)},
             {"swapped_lower", number(r.swapped_lower)},
             {"swapped_upper", number(r.swapped_upper)},
             {"limit", number(r.limit)},
             {"seed", r.seed},
             {"samples", r.samples},
             {"passed", r.passed},
             {"rows", std::move(rows)}};
    if (r.timing_seconds) {
        out["timing_seconds"] = *r.timing_seconds;
    }
    return out;
}

TailReport tail_report_from_json(const Json& j) {
    TailReport r;
    r.description = field<std::string>(j, "description");
    r.dims = field<std::vector<std::size_t>>(j, "dims");
    r.dists = field<std::string>(j, "dists");
    r.t_grid = read_numbers(j.at("t_grid"));
    r.regime = parse_regime(field<std::string>(j, "regime"));
    r.fitted_lower = number_field(j, "fitted_lower");
    r.fitted_upper = number_field(j, "fitted_upper");
    r.fitted = number_field(j, "fitted");
    r.swapped_lower = number_field(j, "swapped_lower");
    r.swapped_upper = number_field(j, "swapped_upper");
    r.limit = number_field(j, "limit");
    r.seed = field<std::uint64_t>(j, "seed");
    r.samples = field<std::size_t>(j, "samples");
    r.passed = field<bool>(j, "passed");
    if (j.contains("timing_seconds")) {
        r.timing_seconds = j.at("timing_seconds").get<double>();
    }
    for (const auto& jr : j.at("rows")) {
        TailRow row;
        row.t = number_field(jr, "t");
        row.level = number_field(jr, "level");
        row.clamped = field<bool>(jr, "clamped");
        row.threshold = number_field(jr, "threshold");
        row.tail = tail_estimate_from_json(jr.at("tail"));
        row.insufficient = field<bool>(jr, "insufficient");
        row.fit_lower = number_field(jr, "fit_lower");
        row.fit_upper = number_field(jr, "fit_upper");
        row.error = field<std::string>(jr, "error");
        r.rows.push_back(std::move(row));
    }
    return r;
}

Json to_json(const RemarkReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"partition", row.partition.text()},
                            {"blocks", row.partition.block_count()},
                            {"p", number(row.p)},
                            {"norm", to_json(row.norm)},
                            {"injective", to_json(row.injective)},
                            {"ratio", number(row.ratio)},
                            {"within", row.within}});
    }
    return Json{{"kind", "gaussian-remark"},
                {"dims", r.dims},
                {"p_grid", numbers(r.p_grid)},
                {"bracket", number(r.bracket)},
                {"passed", r.passed},
                {"rows", std::move(rows)}};
}

std::string ratio_table_csv(const BoundReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "p,total,status,moment,half_width,ratio,within\n";
    for (const auto& row : r.rows) {
        out << row.p << ',' << row.bound.total << ',' << to_string(row.bound.status) << ',' << row.moment.estimate
            << ',' << row.moment.half_width << ',' << row.ratio << ',' << (row.within ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

}  // namespace chaosbound
