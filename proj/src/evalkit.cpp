#include "flipper/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "flipper/agent.hpp"
#include "flipper/rng.hpp"

namespace flipper {

Episode rollout(Environment& env, const TerrainSpec& spec, std::uint64_t seed, const Policy& policy) {
    Episode ep;
    Observation obs = env.reset(spec, seed);
    while (!env.done()) {
        const Action a = policy(obs, env);
        StepOutcome out = env.step(a);
        ep.records.push_back(make_record(env, a, out));
        ep.total_return += out.reward;
        obs = std::move(out.observation);
    }
    ep.terminal = env.terminal();
    return ep;
}

Policy greedy_policy(const QNetwork& net) {
    return [&net](const Observation& obs, const Environment&) { return Action::from_id(greedy_action(net, obs)); };
}

std::string_view to_string(Baseline b) {
    switch (b) {
        case Baseline::flat: return "flat";
        case Baseline::always_down: return "always_down";
        case Baseline::random: return "random";
    }
    return "flat";
}

Baseline baseline_from_string(std::string_view name) {
    for (Baseline b : {Baseline::flat, Baseline::always_down, Baseline::random}) {
        if (to_string(b) == name) return b;
    }
    throw std::invalid_argument("unknown baseline: " + std::string(name));
}

Policy baseline_policy(Baseline b, std::uint64_t seed) {
    switch (b) {
        case Baseline::flat: return [](const Observation&, const Environment&) { return Action(0, 0); };
        case Baseline::always_down:
            return [](const Observation&, const Environment& env) {
                const RobotState& s = env.state();
                return Action(s.front_flipper > -kFlipperLimit ? -1 : 0, s.rear_flipper > -kFlipperLimit ? -1 : 0);
            };
        case Baseline::random: {
            auto rng = std::make_shared<Rng>(seed);
            return [rng](const Observation&, const Environment&) {
                return Action::from_id(static_cast<int>(rng->below(kActionCount)));
            };
        }
    }
    throw std::invalid_argument("unknown baseline");
}

std::string_view to_string(Source s) {
    switch (s) {
        case Source::policy: return "policy";
        case Source::manual: return "manual";
        case Source::baseline: return "baseline";
    }
    return "policy";
}

Source source_from_string(std::string_view name) {
    for (Source s : {Source::policy, Source::manual, Source::baseline}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown source: " + std::string(name));
}

RunMetrics compute_metrics(const std::vector<TrajectoryRecord>& records, double dt, Source source) {
    validate_trajectory(records);
    RunMetrics m;
    m.source = source;
    m.steps = static_cast<int>(records.size());
    m.t_cost = m.steps * dt;
    for (std::size_t i = 1; i < records.size(); ++i) m.theta_hat += std::abs(records[i].theta_R - records[i - 1].theta_R);
    m.terminal = records.back().terminal;
    m.success = m.terminal == Terminal::reached;
    return m;
}

nlohmann::json to_json(const RunMetrics& m) {
    return {{"t_cost", m.t_cost},
            {"theta_hat", m.theta_hat},
            {"success", m.success},
            {"terminal", std::string(to_string(m.terminal))},
            {"source", std::string(to_string(m.source))},
            {"steps", m.steps}};
}

ConditionReport aggregate(const std::string& label, Source source, const std::vector<RunMetrics>& metrics) {
    ConditionReport r;
    r.label = label;
    r.source = source;
    r.metrics = metrics;
    r.runs = static_cast<int>(metrics.size());
    double t_sum = 0.0;
    double th_sum = 0.0;
    double th_min = 0.0;
    double th_max = 0.0;
    double all_sum = 0.0;
    for (const RunMetrics& m : metrics) {
        all_sum += m.theta_hat;
        if (!m.success) continue;
        if (r.successes == 0) {
            th_min = th_max = m.theta_hat;
        } else {
            th_min = std::min(th_min, m.theta_hat);
            th_max = std::max(th_max, m.theta_hat);
        }
        ++r.successes;
        t_sum += m.t_cost;
        th_sum += m.theta_hat;
    }
    if (r.runs > 0) {
        r.success_rate = static_cast<double>(r.successes) / r.runs;
        r.mean_theta_hat_all = all_sum / r.runs;
    }
    if (r.successes > 0) {
        r.mean_t_cost = t_sum / r.successes;
        r.mean_theta_hat = th_sum / r.successes;
        r.theta_hat_range = th_max - th_min;
    }
    return r;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string cell(const std::optional<double>& v, int precision) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << *v;
    return os.str();
}

}  // namespace

nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const RunMetrics& m : r.metrics) runs.push_back(to_json(m));
    return {{"label", r.label},
            {"source", std::string(to_string(r.source))},
            {"runs", r.runs},
            {"successes", r.successes},
            {"success_rate", r.success_rate},
            {"mean_t_cost", optional_json(r.mean_t_cost)},
            {"mean_theta_hat", optional_json(r.mean_theta_hat)},
            {"theta_hat_range", optional_json(r.theta_hat_range)},
            {"mean_theta_hat_all_runs", r.mean_theta_hat_all},
            {"aggregation", "means and range over successful runs"},
            {"metrics", runs}};
}

nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : r.conditions) conditions.push_back(to_json(c));
    return {{"course", r.course}, {"conditions", conditions}};
}

std::string format_table(const ComparisonReport& r) {
    std::vector<std::vector<std::string>> rows{{"indicator"},
                                               {"t_cost [s]"},
                                               {"theta_hat [rad]"},
                                               {"theta_hat_range [rad]"},
                                               {"success rate"},
                                               {"runs"}};
    for (const auto& c : r.conditions) {
        rows[0].push_back(c.label);
        rows[1].push_back(cell(c.mean_t_cost, 2));
        rows[2].push_back(cell(c.mean_theta_hat, 3));
        rows[3].push_back(cell(c.theta_hat_range, 3));
        rows[4].push_back(cell(c.success_rate, 2));
        rows[5].push_back(std::to_string(c.runs));
    }
    std::vector<std::size_t> widths(rows[0].size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream os;
    os << "course: " << r.course << "  (means over successful runs)\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i == 0) {
                os << std::left << std::setw(static_cast<int>(widths[i])) << row[i];
            } else {
                os << "  " << std::right << std::setw(static_cast<int>(widths[i])) << row[i];
            }
        }
        os << '\n';
    }
    return os.str();
}

EvalRun evaluate(const std::function<Policy(int)>& policy_for, const std::string& label, Source source,
                 const TerrainSpec& spec, const std::vector<std::uint64_t>& seeds, const EnvConfig& config) {
    if (seeds.empty()) throw std::invalid_argument("evaluation needs at least one repeat");
    Environment env(config);
    EvalRun run;
    std::vector<RunMetrics> metrics;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        run.episodes.push_back(rollout(env, spec, seeds[i], policy_for(static_cast<int>(i))));
        metrics.push_back(compute_metrics(run.episodes.back().records, config.dt, source));
    }
    run.report = aggregate(label, source, metrics);
    return run;
}

std::vector<std::uint64_t> repeat_seeds(int repeats) {
    if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
    std::vector<std::uint64_t> out;
    for (int i = 1; i <= repeats; ++i) out.push_back(static_cast<std::uint64_t>(i));
    return out;
}

}  // namespace flipper
