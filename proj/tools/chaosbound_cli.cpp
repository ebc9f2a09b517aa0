// SPDX-License-Identifier: MIT
//
// chaosbound: command-line front end for the norm engine and the harness.
//
// Exit codes: 0 ok, 1 a checked bracket failed, 2 bad input, 3 solver or
// estimator failure. CHAOSBOUND_SAMPLES overrides the default sample count.
#include "chaosbound/errors.hpp"
#include "chaosbound/harness.hpp"
#include "chaosbound/oracle.hpp"
#include "chaosbound/report_json.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace cb = chaosbound;

namespace {

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kBadInput = 2;
constexpr int kSolverFailure = 3;

std::size_t default_samples() {
    if (const char* env = std::getenv("CHAOSBOUND_SAMPLES")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size() && v > 0) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
        }
        throw cb::InvalidInput("CHAOSBOUND_SAMPLES: expected a positive integer");
    }
    return 1'000'000;
}

struct Common {
    std::string tensor;
    int order = 0;
    std::string family = "gaussian";
    std::size_t n = 0;
    std::vector<std::string> dist{"exp"};
    std::uint64_t seed = 1;
    int restarts = 16;
    std::string out;
};

struct SamplingFlags {
    std::optional<std::size_t> samples;
    std::size_t shards = 32;
    bool timing = false;
};

void add_tensor_flags(CLI::App* cmd, Common& c, bool allow_fixture) {
    auto* tensor = cmd->add_option("--tensor", c.tensor, "Tensor JSON file {order, dims, values, symmetric?}");
    if (allow_fixture) {
        auto* d = cmd->add_option("--d", c.order, "Generate a fixture of this order instead of reading --tensor")
                      ->check(CLI::Range(1, 4));
        tensor->excludes(d);
        cmd->add_option("--family", c.family, "Fixture family: gaussian, sparse, rank-one, identity")
            ->capture_default_str();
        cmd->add_option("--n", c.n, "Fixture side length (default: smallest standard size)");
    } else {
        tensor->required();
    }
    cmd->add_option("--dist", c.dist,
                    "Generator law: exp, pow:r=<r>, gauss, table:<path>; give once for all axes or once per axis")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed for every random choice")->capture_default_str();
    cmd->add_option("--restarts", c.restarts, "Multi-start count for local searches")->capture_default_str();
    cmd->add_option("--out", c.out, "Write the report here instead of stdout");
}

void add_sampling_flags(CLI::App* cmd, SamplingFlags& s) {
    cmd->add_option("--samples", s.samples, "Monte Carlo samples (default 1000000 or $CHAOSBOUND_SAMPLES)");
    cmd->add_option("--shards", s.shards, "Shards for median-of-means")->capture_default_str();
    cmd->add_flag("--timing", s.timing, "Record wall-clock time in the report");
}

cb::CoefficientTensor load_tensor(const Common& c, bool* symmetric = nullptr) {
    if (!c.tensor.empty()) {
        auto file = cb::read_tensor_file(c.tensor);
        if (symmetric) {
            *symmetric = file.symmetric;
        }
        return std::move(file.tensor);
    }
    if (c.order == 0) {
        throw cb::InvalidInput("--tensor: required unless --d is given");
    }
    const std::size_t n = c.n > 0 ? c.n : cb::fixture_sizes(c.order).front();
    auto fixture = cb::make_fixture(cb::parse_fixture_family(c.family), c.order, n);
    if (symmetric) {
        *symmetric = fixture.tensor.is_symmetric_tetrahedral();
    }
    return std::move(fixture.tensor);
}

cb::DistributionMatrix load_dists(const Common& c, const cb::CoefficientTensor& a) {
    std::vector<cb::TailFunction> fs;
    for (const auto& s : c.dist) {
        fs.push_back(cb::parse_tail_spec(s));
    }
    if (fs.size() == 1) {
        return cb::DistributionMatrix::iid(fs.front(), a.dims());
    }
    if (static_cast<int>(fs.size()) != a.order()) {
        throw cb::InvalidInput("--dist: give one law or exactly one per axis (" + std::to_string(a.order()) + ")");
    }
    return cb::DistributionMatrix::per_axis(fs, a.dims());
}

cb::NormOptions norm_options(const Common& c) {
    cb::NormOptions o;
    o.seed = c.seed;
    o.restarts = c.restarts;
    if (o.restarts < 1) {
        throw cb::InvalidInput("--restarts: must be at least 1");
    }
    return o;
}

cb::MCConfig mc_config(const Common& c, const SamplingFlags& s) {
    cb::MCConfig m;
    m.samples = s.samples.value_or(default_samples());
    m.shards = s.shards;
    m.seed = c.seed;
    m.norm = norm_options(c);
    m.timing = s.timing;
    return m;
}

std::vector<cb::Partition> select_partitions(const std::vector<std::string>& texts, int d) {
    if (texts.empty()) {
        return cb::enumerate_partitions(d);
    }
    std::vector<cb::Partition> out;
    for (const auto& t : texts) {
        out.push_back(cb::parse_partition(t, d));
    }
    return out;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
        throw cb::InvalidInput("--out: cannot open '" + c.out + "' for writing");
    }
    f << text;
}

int cmd_norm(const Common& c, const std::vector<double>& ps, const std::vector<std::string>& parts,
             bool check_remark) {
    const auto a = load_tensor(c);
    const auto dists = load_dists(c, a);
    const auto options = norm_options(c);
    const bool exponential = dists.all_of_kind(cb::TailKind::exponential);
    cb::Json rows = cb::Json::array();
    for (const auto& j : select_partitions(parts, a.order())) {
        const auto inj = cb::injective_norm(a, j, options);
        for (double p : ps) {
            const auto v = cb::partition_norm(a, j, p, dists, options);
            cb::Json row{{"partition", j.text()}, {"p", p}, {"norm", cb::to_json(v)}, {"injective", cb::to_json(inj)}};
            if (exponential) {
                row["closed_form"] = cb::to_json(cb::exponential_closed_form(a, j, p, options));
            }
            if (check_remark) {
                const double scale = std::pow(p, 0.5 * j.block_count()) * inj.value;
                row["remark_ratio"] = scale > 0.0 ? v.value / scale : (v.value == 0.0 ? 1.0 : HUGE_VAL);
            }
            rows.push_back(std::move(row));
        }
    }
    const cb::Json doc{{"kind", "norms"},
                       {"dims", a.dims()},
                       {"dists", dists.describe()},
                       {"regime", cb::to_string(cb::classify_regime(a.order(), dists))},
                       {"seed", c.seed},
                       {"rows", std::move(rows)}};
    emit(c, cb::dump(doc));
    return kOk;
}

int cmd_compare(const Common& c, const SamplingFlags& s, const std::vector<double>& ps,
                std::optional<double> acceptance, bool csv) {
    const auto a = load_tensor(c);
    const auto dists = load_dists(c, a);
    const auto report = cb::run_two_sided(a, dists, ps, mc_config(c, s), acceptance);
    emit(c, csv ? cb::ratio_table_csv(report) : cb::dump(cb::to_json(report)));
    return report.passed ? kOk : kAssertion;
}

int cmd_tail(const Common& c, const SamplingFlags& s, const std::vector<double>& ts, double limit) {
    const auto a = load_tensor(c);
    const auto dists = load_dists(c, a);
    const auto report = cb::run_tail(a, dists, ts, mc_config(c, s), limit);
    emit(c, cb::dump(cb::to_json(report)));
    return report.passed ? kOk : kAssertion;
}

int cmd_decouple(const Common& c, const SamplingFlags& s, const std::vector<double>& ps, double bracket) {
    const auto a = load_tensor(c);
    const auto dists = load_dists(c, a);
    const auto config = mc_config(c, s);
    cb::Json rows = cb::Json::array();
    bool passed = true;
    for (double p : ps) {
        const auto cmp = cb::decouple_compare(a, dists, p, config.samples, config.seed, config.shards);
        const bool within = cmp.ratio >= 1.0 / bracket && cmp.ratio <= bracket;
        passed = passed && within;
        rows.push_back(cb::Json{{"p", p},
                                {"undecoupled", cb::to_json(cmp.undecoupled)},
                                {"decoupled", cb::to_json(cmp.decoupled)},
                                {"ratio", cmp.ratio},
                                {"ratio_half_width", cmp.ratio_half_width},
                                {"within", within}});
    }
    const cb::Json doc{{"kind", "decouple"},
                       {"dims", a.dims()},
                       {"dists", dists.describe()},
                       {"bracket", bracket},
                       {"seed", c.seed},
                       {"samples", config.samples},
                       {"passed", passed},
                       {"rows", std::move(rows)}};
    emit(c, cb::dump(doc));
    return passed ? kOk : kAssertion;
}

int cmd_oracle(const Common& c, const std::vector<double>& ps, const std::vector<std::string>& parts,
               double resolution, std::size_t random_points) {
    const auto a = load_tensor(c);
    const auto dists = load_dists(c, a);
    const auto options = norm_options(c);
    cb::OracleOptions oracle;
    oracle.resolution = resolution;
    oracle.random_points = random_points;
    oracle.seed = c.seed;
    cb::Json rows = cb::Json::array();
    bool agree = true;
    for (const auto& j : select_partitions(parts, a.order())) {
        for (const auto& choice : cb::designated_choices(j)) {
            std::string label;
            for (int axis : choice) {
                label += std::to_string(axis + 1);
            }
            for (double p : ps) {
                const auto solver = cb::choice_sup(a, j, choice, p, dists, options);
                const auto brute = cb::brute_force_sup(a, j, choice, p, dists, oracle);
                const double diff = solver.value.value - brute.value;
                const bool ok = std::abs(diff) <= 1e-2 * std::max(1.0, brute.value);
                agree = agree && ok;
                rows.push_back(cb::Json{{"partition", j.text()},
                                        {"designated", label},
                                        {"p", p},
                                        {"solver", cb::to_json(solver.value)},
                                        {"oracle", cb::to_json(brute)},
                                        {"difference", diff},
                                        {"agree", ok}});
            }
        }
    }
    const cb::Json doc{{"kind", "oracle"},
                       {"dims", a.dims()},
                       {"dists", dists.describe()},
                       {"resolution", resolution},
                       {"seed", c.seed},
                       {"passed", agree},
                       {"rows", std::move(rows)}};
    emit(c, cb::dump(doc));
    return agree ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moment and tail bounds for polynomial chaoses, checked by Monte Carlo"};
    app.require_subcommand(1);

    Common common;
    SamplingFlags sampling;
    std::vector<double> ps;
    std::vector<double> ts{2, 3, 4};
    std::vector<std::string> parts;
    bool all_partitions = false;
    bool check_remark = false;
    std::optional<double> acceptance;
    bool csv = false;
    double tail_limit = 16.0;
    double bracket = 20.0;
    double resolution = 0.05;
    std::size_t random_points = 100000;

    auto* norm = app.add_subcommand("norm", "Partition norms, injective norms and the exponential closed form");
    add_tensor_flags(norm, common, false);
    norm->add_option("--p", ps, "Levels p >= 2, comma separated (default 4)")->delimiter(',');
    norm->add_option("--partition", parts, "Partition such as 12|3; repeatable (default: all)");
    norm->add_flag("--all-partitions", all_partitions, "Every partition of the axes (the default)");
    norm->add_flag("--check-remark", check_remark, "Add norm / (p^{k/2} * injective norm) to each row");

    auto* compare = app.add_subcommand("compare", "Bound totals against Monte Carlo moments");
    add_tensor_flags(compare, common, true);
    add_sampling_flags(compare, sampling);
    compare->add_option("--p", ps, "Levels p >= 2, comma separated (default 2,4,8)")->delimiter(',');
    compare->add_option("--acceptance", acceptance, "Ratio bracket L (default 8/32/64/128 by order)");
    compare->add_flag("--csv", csv, "Emit the ratio table as CSV");

    auto* tail = app.add_subcommand("tail", "Tail probabilities at the bound thresholds");
    add_tensor_flags(tail, common, true);
    add_sampling_flags(tail, sampling);
    tail->add_option("--t", ts, "Levels t > 0, comma separated")->delimiter(',')->capture_default_str();
    tail->add_option("--limit", tail_limit, "Largest acceptable fitted constant")->capture_default_str();

    auto* decouple = app.add_subcommand("decouple", "Moments of a chaos against its decoupled version");
    add_tensor_flags(decouple, common, true);
    add_sampling_flags(decouple, sampling);
    decouple->add_option("--p", ps, "Levels p >= 1, comma separated (default 4)")->delimiter(',');
    decouple->add_option("--bracket", bracket, "Acceptable ratio bracket")->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "Solver against brute-force search, per designated axes");
    add_tensor_flags(oracle, common, false);
    oracle->add_option("--p", ps, "Levels p >= 2, comma separated (default 4)")->delimiter(',');
    oracle->add_option("--partition", parts, "Partition such as 12|3; repeatable (default: all)");
    oracle->add_option("--resolution", resolution, "Grid and compass step, at most 0.1")->capture_default_str();
    oracle->add_option("--random-points", random_points, "Random boundary points")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    try {
        if (*norm) {
            if (all_partitions && !parts.empty()) {
                throw cb::InvalidInput("--all-partitions: cannot be combined with --partition");
            }
            return cmd_norm(common, ps.empty() ? std::vector<double>{4} : ps, parts, check_remark);
        }
        if (*compare) {
            return cmd_compare(common, sampling, ps.empty() ? std::vector<double>{2, 4, 8} : ps, acceptance, csv);
        }
        if (*tail) {
            return cmd_tail(common, sampling, ts, tail_limit);
        }
        if (*decouple) {
            return cmd_decouple(common, sampling, ps.empty() ? std::vector<double>{4} : ps, bracket);
        }
        if (*oracle) {
            return cmd_oracle(common, ps.empty() ? std::vector<double>{4} : ps, parts, resolution, random_points);
        }
    } catch (const cb::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const cb::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const cb::EstimatorUnstable& e) {
        std::cerr << "estimator failure: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kOk;
}
