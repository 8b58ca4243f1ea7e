#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flipper/env.hpp"
#include "flipper/network.hpp"
#include "flipper/trajectory.hpp"
#include "json.hpp"

namespace flipper {

using Policy = std::function<Action(const Observation&, const Environment&)>;

struct Episode {
    std::vector<TrajectoryRecord> records;
    double total_return = 0.0;
    Terminal terminal = Terminal::none;
};

// Runs one episode from reset to its terminal step.
Episode rollout(Environment& env, const TerrainSpec& spec, std::uint64_t seed, const Policy& policy);

Policy greedy_policy(const QNetwork& net);

enum class Baseline { flat, always_down, random };
std::string_view to_string(Baseline b);
Baseline baseline_from_string(std::string_view name);
// random draws from its own seeded stream, so a fresh policy object replays identically.
Policy baseline_policy(Baseline b, std::uint64_t seed);

enum class Source { policy, manual, baseline };
std::string_view to_string(Source s);
Source source_from_string(std::string_view name);

struct RunMetrics {
    double t_cost = 0.0;     // s
    double theta_hat = 0.0;  // rad, summed |pitch change| between consecutive records
    bool success = false;
    Terminal terminal = Terminal::none;
    Source source = Source::policy;
    int steps = 0;
};

// Throws SchemaError on an invalid trajectory.
RunMetrics compute_metrics(const std::vector<TrajectoryRecord>& records, double dt, Source source = Source::policy);

nlohmann::json to_json(const RunMetrics& m);

// Means and range over successful runs only; the all-run mean of theta_hat is kept separately.
struct ConditionReport {
    std::string label;
    Source source = Source::policy;
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    std::optional<double> mean_t_cost;
    std::optional<double> mean_theta_hat;
    std::optional<double> theta_hat_range;
    double mean_theta_hat_all = 0.0;
    std::vector<RunMetrics> metrics;
};

ConditionReport aggregate(const std::string& label, Source source, const std::vector<RunMetrics>& metrics);

struct ComparisonReport {
    std::string course;
    std::vector<ConditionReport> conditions;
};

nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const ComparisonReport& r);
// Rows t_cost, theta_hat, theta_hat_range, success rate and runs; one column per condition.
std::string format_table(const ComparisonReport& r);

// policy_for(i) builds the policy for repeat i, which resets with seeds[i].
struct EvalRun {
    ConditionReport report;
    std::vector<Episode> episodes;
};

EvalRun evaluate(const std::function<Policy(int)>& policy_for, const std::string& label, Source source,
                 const TerrainSpec& spec, const std::vector<std::uint64_t>& seeds, const EnvConfig& config = {});

// Seeds 1..repeats, the default for repeated evaluation.
std::vector<std::uint64_t> repeat_seeds(int repeats);

}  // namespace flipper
