#include "flipper/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flipper {

double TrainConfig::epsilon(long long step) const {
    if (eps_decay_steps <= 0 || step >= eps_decay_steps) return eps_end;
    const double f = static_cast<double>(step) / eps_decay_steps;
    return eps_start + f * (eps_end - eps_start);
}

void TrainConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
    if (batch < 1 || capacity < batch) throw std::invalid_argument("need 1 <= batch <= capacity");
    if (warmup_steps < 0 || target_sync_period < 1) throw std::invalid_argument("bad warmup or target sync period");
    if (!(eps_end <= eps_start) || eps_end < 0.0 || eps_start > 1.0) {
        throw std::invalid_argument("epsilon schedule must satisfy 0 <= eps_end <= eps_start <= 1");
    }
    if (episodes < 0 || eval_every < 0 || eval_episodes < 0) throw std::invalid_argument("negative episode counts");
    if (!(grad_clip > 0.0)) throw std::invalid_argument("grad_clip must be positive");
}

int argmax(const Eigen::VectorXd& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i) {
        if (q[i] > q[best]) best = i;
    }
    return best;
}

int greedy_action(const QNetwork& net, const Observation& obs) { return argmax(net.forward(obs)); }

Action select_action(const QNetwork& net, const Observation& obs, double eps, Rng& rng) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (rng.uniform() < eps) return Action::from_id(static_cast<int>(rng.below(net.shape().actions)));
    return Action::from_id(greedy_action(net, obs));
}

double double_q_target(double reward, bool terminal, const Observation& next, const QNetwork& online,
                       const QNetwork& target, double gamma) {
    if (terminal) return reward;
    const int a = argmax(online.forward(next));
    return reward + gamma * target.forward(next)[a];
}

namespace {

Eigen::MatrixXd stack(const std::vector<const Transition*>& batch, bool next, int width) {
    Eigen::MatrixXd m(width, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const Observation& o = next ? batch[j]->next_observation : batch[j]->observation;
        if (static_cast<int>(o.size()) != width) throw std::invalid_argument("transition width does not match the network");
        m.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(o.data(), width);
    }
    return m;
}

}  // namespace

double batch_loss(const QNetwork& online, const QNetwork& target, const std::vector<const Transition*>& batch,
                  double gamma, LayerSet* grads) {
    const int width = online.shape().input_width();
    const auto b = static_cast<Eigen::Index>(batch.size());
    const Eigen::MatrixXd s = stack(batch, false, width);
    const Eigen::MatrixXd s2 = stack(batch, true, width);
    const Eigen::MatrixXd q_next_online = online.forward_batch(s2);
    const Eigen::MatrixXd q_next_target = target.forward_batch(s2);
    const Eigen::MatrixXd q = online.forward_batch(s);

    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), b);
    double loss = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) {
        const Transition& t = *batch[static_cast<std::size_t>(j)];
        double y = t.reward;
        if (!t.terminal) y += gamma * q_next_target(argmax(q_next_online.col(j)), j);
        const double err = q(t.action, j) - y;
        loss += err * err;
        dq(t.action, j) = 2.0 * err / static_cast<double>(b);
    }
    if (grads) *grads = online.backward(s, dq);
    return loss / static_cast<double>(b);
}

TrainStepResult train_step(QNetwork& online, const QNetwork& target, const ReplayBuffer& buffer, Adam& optimizer,
                           const TrainConfig& config, Rng& rng) {
    const auto needed = static_cast<std::size_t>(std::max(config.batch, config.warmup_steps));
    if (buffer.size() < needed) throw std::invalid_argument("replay buffer below batch or warmup size");
    const auto idx = buffer.sample_indices(static_cast<std::size_t>(config.batch), rng);
    std::vector<const Transition*> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(&buffer.slot(i));

    TrainStepResult out;
    LayerSet grads;
    out.loss = batch_loss(online, target, batch, config.gamma, &grads);
    out.grad_norm = std::sqrt(squared_norm(grads));
    if (out.grad_norm > config.grad_clip) scale(grads, config.grad_clip / out.grad_norm);
    optimizer.step(online, grads);
    return out;
}

}  // namespace flipper
