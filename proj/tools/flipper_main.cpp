#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flipper/checkpoint.hpp"
#include "flipper/config.hpp"
#include "flipper/evalkit.hpp"
#include "flipper/svg.hpp"
#include "flipper/trainer.hpp"
#include "flipper/ws_server.hpp"

using namespace flipper;

namespace {

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (!path.empty()) c = load_run_config(path);
    return c;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

struct GenTerrainArgs {
    std::string kind = "step";
    double height = 0.4;
    double run = 3.0;
    double rise = 0.2;
    int count = 6;
    std::string direction = "up";
    std::string course = "single_step_04";
    double length = kFlatLength;
    std::uint64_t seed = 0;
    std::string out;
};

int gen_terrain(const GenTerrainArgs& a) {
    TerrainProfile p = make_flat(a.length);
    if (a.kind == "step") {
        p = generate_step(a.height, a.run, a.seed);
    } else if (a.kind == "stairs") {
        p = generate_stairs(a.rise, a.run, a.count, a.direction == "down" ? StairDirection::down : StairDirection::up, a.seed);
    } else if (a.kind == "course") {
        p = generate_eval_course(eval_course_from_string(a.course));
    } else if (a.kind == "scenario-step") {
        p = make_terrain(TerrainSpec::step(), a.seed);
    } else if (a.kind == "scenario-stair") {
        p = make_terrain(TerrainSpec::stair(), a.seed);
    } else if (a.kind != "flat") {
        throw std::invalid_argument("unknown terrain kind: " + a.kind);
    }
    write_text(a.out, p.to_json().dump(2) + "\n");
    return 0;
}

struct TrainArgs {
    std::string scenario = "step";
    std::string config;
    std::string out;
    std::string log;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    bool quiet = false;
};

int train_cmd(const TrainArgs& a) {
    RunConfig c = load_config(a.config);
    if (a.seed) c.train.seed = *a.seed;
    if (a.episodes) c.train.episodes = *a.episodes;
    c.train.validate();
    TerrainSpec spec;
    if (a.scenario == "step") {
        spec = TerrainSpec::step();
    } else if (a.scenario == "stair") {
        spec = TerrainSpec::stair();
    } else {
        throw std::invalid_argument("scenario must be step or stair");
    }
    const std::string log_path = a.log.empty() ? a.out + ".log.jsonl" : a.log;
    std::ofstream log(log_path);
    if (!log) throw std::runtime_error("cannot open " + log_path);
    const TrainResult r = train(spec, c.env, c.train, [&](const EpisodeLog& e) {
        log << to_json(e).dump() << '\n';
        if (!a.quiet && e.eval_success_rate) {
            std::cerr << "episode " << e.episode + 1 << "/" << c.train.episodes << "  validation success "
                      << *e.eval_success_rate << '\n';
        }
    });
    nlohmann::json echo = to_json(c);
    echo["scenario"] = a.scenario;
    echo["best_episode"] = r.best_episode;
    save_checkpoint(r.best, a.out, echo);
    std::cout << "wrote " << a.out << " (" << r.total_steps << " steps, best validation success "
              << r.best_success_rate.value_or(0.0) << " at episode " << r.best_episode + 1 << ")\n";
    return 0;
}

struct EvalArgs {
    std::string ckpt;
    std::string course = "single_step_04";
    int repeats = 5;
    std::vector<std::string> baselines;
    std::vector<std::string> manual_logs;
    std::string config;
    std::string out;
    std::string record_dir;
};

void record_episodes(const std::string& dir, const std::string& label, const std::vector<Episode>& episodes) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        write_trajectory(std::filesystem::path(dir) / (label + "-" + std::to_string(i + 1) + ".jsonl"), episodes[i].records);
    }
}

int eval_cmd(const EvalArgs& a) {
    const RunConfig c = load_config(a.config);
    const EvalCourse course = eval_course_from_string(a.course);
    const TerrainSpec spec = TerrainSpec::eval_course(course);
    const auto seeds = repeat_seeds(a.repeats);
    ComparisonReport report;
    report.course = a.course;
    if (!a.ckpt.empty()) {
        const QNetwork net = load_checkpoint(a.ckpt, c.env.n);
        EvalRun run = evaluate([&](int) { return greedy_policy(net); }, "policy", Source::policy, spec, seeds, c.env);
        record_episodes(a.record_dir, "policy", run.episodes);
        report.conditions.push_back(std::move(run.report));
    }
    if (!a.manual_logs.empty()) {
        std::vector<RunMetrics> m;
        for (const auto& path : a.manual_logs) m.push_back(compute_metrics(read_trajectory(path), c.env.dt, Source::manual));
        report.conditions.push_back(aggregate("manual", Source::manual, m));
    }
    for (const auto& name : a.baselines) {
        const Baseline b = baseline_from_string(name);
        EvalRun run = evaluate([&](int i) { return baseline_policy(b, seeds[static_cast<std::size_t>(i)]); }, name,
                               Source::baseline, spec, seeds, c.env);
        record_episodes(a.record_dir, name, run.episodes);
        report.conditions.push_back(std::move(run.report));
    }
    if (report.conditions.empty()) throw std::invalid_argument("nothing to evaluate: give --ckpt, --baseline or --manual-log");
    std::cout << format_table(report);
    if (!a.out.empty()) write_json_file(a.out, to_json(report));
    return 0;
}

struct ServeArgs {
    std::string address = "127.0.0.1";
    unsigned short port = 8765;
    std::string course = "single_step_04";
    std::string mode = "teleop";
    std::string record_dir = "teleop_runs";
    std::string ckpt;
    std::string config;
    double speed = 1.0;
};

WsServer* g_server = nullptr;

int serve_cmd(const ServeArgs& a) {
    const RunConfig c = load_config(a.config);
    ServerOptions o;
    o.address = a.address;
    o.port = a.port;
    o.env = c.env;
    o.course = eval_course_from_string(a.course);
    o.mode = session_mode_from_string(a.mode);
    o.record_dir = a.record_dir;
    o.speed = a.speed;
    if (!a.ckpt.empty()) o.policy = std::make_shared<QNetwork>(load_checkpoint(a.ckpt, c.env.n));
    if (o.mode == SessionMode::policy_live && !o.policy) throw std::invalid_argument("--mode policy_live needs --ckpt");
    WsServer server(o);
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
    });
    std::cout << "listening on ws://" << a.address << ":" << server.port() << "  (recording to " << a.record_dir << ")"
              << std::endl;
    server.run();
    g_server = nullptr;
    return 0;
}

struct ReplayArgs {
    std::string log;
    std::string course = "single_step_04";
    std::string terrain;
    std::string svg;
    std::string config;
    int stride = 5;
};

int replay_cmd(const ReplayArgs& a) {
    const RunConfig c = load_config(a.config);
    const auto logged = read_trajectory(a.log);
    const TerrainSpec spec = a.terrain.empty() ? TerrainSpec::eval_course(eval_course_from_string(a.course))
                                               : TerrainSpec::fixed(TerrainProfile::from_json(read_json_file(a.terrain)));
    Environment env(c.env);
    env.reset(spec, 0);
    std::vector<TrajectoryRecord> replayed;
    for (const auto& r : logged) {
        if (env.done()) break;
        const Action act = Action::from_id(r.action_id);
        replayed.push_back(make_record(env, act, env.step(act)));
    }
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < logged.size(); ++i) mismatches += i >= replayed.size() || !(replayed[i] == logged[i]);
    if (!a.svg.empty()) write_text(a.svg, render_svg(env.terrain(), env.geometry(), replayed, a.stride));
    nlohmann::json out{{"logged", to_json(compute_metrics(logged, c.env.dt))},
                       {"replayed", to_json(compute_metrics(replayed, c.env.dt))},
                       {"mismatched_records", mismatches}};
    std::cout << out.dump(2) << '\n';
    return mismatches == 0 ? 0 : 3;
}

struct MetricsArgs {
    std::vector<std::string> logs;
    std::string source = "policy";
    double dt = EnvConfig{}.dt;
};

int metrics_cmd(const MetricsArgs& a) {
    const Source source = source_from_string(a.source);
    for (const auto& path : a.logs) {
        nlohmann::json j = to_json(compute_metrics(read_trajectory(path), a.dt, source));
        j["log"] = path;
        std::cout << j.dump() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flipper control for a tracked robot: terrain, simulation, training, evaluation, teleoperation"};
    app.require_subcommand(1);

    GenTerrainArgs gen;
    auto* g = app.add_subcommand("gen-terrain", "Write a terrain profile as JSON");
    g->add_option("--kind", gen.kind, "flat | step | stairs | course | scenario-step | scenario-stair")->capture_default_str();
    g->add_option("--height", gen.height, "signed step height (m)")->capture_default_str();
    g->add_option("--run", gen.run, "plateau length for steps, tread for stairs (m)")->capture_default_str();
    g->add_option("--rise", gen.rise, "stair rise (m)")->capture_default_str();
    g->add_option("--count", gen.count, "stair count")->capture_default_str();
    g->add_option("--direction", gen.direction, "up | down")->capture_default_str();
    g->add_option("--course", gen.course, "single_step_04 | steep_stair")->capture_default_str();
    g->add_option("--length", gen.length, "flat length (m)")->capture_default_str();
    g->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
    g->add_option("--out", gen.out, "output file (stdout when omitted)");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a policy and write a checkpoint");
    t->add_option("--scenario", tr.scenario, "step | stair")->capture_default_str();
    t->add_option("--config", tr.config, "JSON config {env, train}")->check(CLI::ExistingFile);
    t->add_option("--out", tr.out, "checkpoint path")->required();
    t->add_option("--log", tr.log, "training log JSONL (default <out>.log.jsonl)");
    t->add_option("--seed", tr.seed, "overrides train.seed");
    t->add_option("--episodes", tr.episodes, "overrides train.episodes");
    t->add_flag("--quiet", tr.quiet, "no progress output");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Repeated runs on an evaluation course and comparison report");
    e->add_option("--ckpt", ev.ckpt, "checkpoint to evaluate")->check(CLI::ExistingFile);
    e->add_option("--course", ev.course, "single_step_04 | steep_stair")->capture_default_str();
    e->add_option("--repeats", ev.repeats, "runs per condition")->capture_default_str();
    e->add_option("--baseline", ev.baselines, "flat | always_down | random (repeatable)");
    e->add_option("--manual-log", ev.manual_logs, "recorded teleop trajectories (repeatable)")->check(CLI::ExistingFile);
    e->add_option("--config", ev.config, "JSON config {env, train}")->check(CLI::ExistingFile);
    e->add_option("--out", ev.out, "report JSON path");
    e->add_option("--record-dir", ev.record_dir, "write each run's trajectory here");

    ServeArgs sv;
    auto* s = app.add_subcommand("teleop-serve", "Websocket teleoperation and live policy service");
    s->add_option("--address", sv.address, "bind address")->capture_default_str();
    s->add_option("--port", sv.port, "port (0 picks a free one)")->capture_default_str();
    s->add_option("--course", sv.course, "default course")->capture_default_str();
    s->add_option("--mode", sv.mode, "teleop | policy_live (default for start messages)")->capture_default_str();
    s->add_option("--record-dir", sv.record_dir, "where finished episodes are written")->capture_default_str();
    s->add_option("--ckpt", sv.ckpt, "checkpoint enabling policy_live sessions")->check(CLI::ExistingFile);
    s->add_option("--config", sv.config, "JSON config {env, train}")->check(CLI::ExistingFile);
    s->add_option("--speed", sv.speed, "tick speed multiplier")->capture_default_str();

    ReplayArgs rp;
    auto* r = app.add_subcommand("replay", "Re-simulate a trajectory's actions and recompute its metrics");
    r->add_option("--log", rp.log, "trajectory JSONL")->required()->check(CLI::ExistingFile);
    r->add_option("--course", rp.course, "course the log was recorded on")->capture_default_str();
    r->add_option("--terrain", rp.terrain, "terrain JSON instead of a course")->check(CLI::ExistingFile);
    r->add_option("--svg", rp.svg, "write a side-view SVG");
    r->add_option("--stride", rp.stride, "draw every n-th pose")->capture_default_str();
    r->add_option("--config", rp.config, "JSON config {env, train}")->check(CLI::ExistingFile);

    MetricsArgs me;
    auto* m = app.add_subcommand("metrics", "t_cost and theta_hat of trajectory logs");
    m->add_option("--log", me.logs, "trajectory JSONL (repeatable)")->required()->check(CLI::ExistingFile);
    m->add_option("--source", me.source, "policy | manual | baseline")->capture_default_str();
    m->add_option("--dt", me.dt, "seconds per step")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*g) return gen_terrain(gen);
        if (*t) return train_cmd(tr);
        if (*e) return eval_cmd(ev);
        if (*s) return serve_cmd(sv);
        if (*r) return replay_cmd(rp);
        if (*m) return metrics_cmd(me);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
