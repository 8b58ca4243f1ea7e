#pragma once

#include <cstdint>

#include "flipper/network.hpp"
#include "flipper/replay_buffer.hpp"

namespace flipper {

struct TrainConfig {
    double gamma = 0.99;
    double lr = 1e-3;
    int batch = 64;
    int capacity = 100000;
    int warmup_steps = 1000;
    int target_sync_period = 1000;
    double eps_start = 1.0;
    double eps_end = 0.05;
    int eps_decay_steps = 50000;
    int episodes = 5000;
    int eval_every = 100;
    int eval_episodes = 20;
    double grad_clip = 10.0;
    std::uint64_t seed = 1;
    NetworkShape network;

    // Linear decay from eps_start to eps_end.
    double epsilon(long long step) const;
    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

// Index of the largest entry, lowest index on ties.
int argmax(const Eigen::VectorXd& q);

int greedy_action(const QNetwork& net, const Observation& obs);
// With probability eps a uniform action, else greedy. One uniform draw decides, a second picks.
Action select_action(const QNetwork& net, const Observation& obs, double eps, Rng& rng);

double double_q_target(double reward, bool terminal, const Observation& next, const QNetwork& online,
                       const QNetwork& target, double gamma);

struct TrainStepResult {
    double loss = 0.0;
    double grad_norm = 0.0;  // before clipping
};

// One Adam step on a uniformly sampled batch with double-Q targets and MSE loss.
TrainStepResult train_step(QNetwork& online, const QNetwork& target, const ReplayBuffer& buffer, Adam& optimizer,
                           const TrainConfig& config, Rng& rng);

// The loss and gradient used by train_step for a fixed set of transitions.
double batch_loss(const QNetwork& online, const QNetwork& target, const std::vector<const Transition*>& batch,
                  double gamma, LayerSet* grads);

}  // namespace flipper
