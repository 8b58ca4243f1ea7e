#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flipper {

inline constexpr double kLeakySlope = 0.01;
inline constexpr int kRobotFeatures = 3;

struct NetworkShape {
    int n = 15;  // terrain bins
    int encoder1 = 64;
    int encoder2 = 64;
    int fusion = 64;
    int head = 32;
    int actions = 9;

    int input_width() const { return n + kRobotFeatures; }
    bool operator==(const NetworkShape&) const = default;
};

struct Dense {
    std::string name;
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
};

// Same layout as QNetwork::layers(); used for gradients and optimizer moments.
using LayerSet = std::vector<Dense>;

// Terrain encoder (two layers), fusion with the robot features, then value and advantage heads of
// two layers each. Q = V + A - mean(A).
class QNetwork {
public:
    enum Layer { encoder0, encoder1, fusion, value0, value1, advantage0, advantage1, layer_count };

    explicit QNetwork(NetworkShape shape = {});

    // Uniform in +-sqrt(6 / (fan_in + fan_out)) for weights, zero biases.
    void initialize(std::uint64_t seed);

    const NetworkShape& shape() const { return shape_; }
    LayerSet& layers() { return layers_; }
    const LayerSet& layers() const { return layers_; }
    Dense& layer(Layer l) { return layers_[l]; }
    const Dense& layer(Layer l) const { return layers_[l]; }
    std::size_t parameter_count() const;

    // Throws std::invalid_argument when the width differs from shape().input_width().
    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
    Eigen::VectorXd forward(const std::vector<double>& input) const;
    // Columns are samples; returns actions x batch.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

    // Gradient of sum(dq .* Q(inputs)), dq being actions x batch.
    LayerSet backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& dq) const;

    // A zero-valued set with this network's layer shapes.
    LayerSet zeros_like() const;

private:
    struct Activations;
    void run(const Eigen::MatrixXd& inputs, Activations& a) const;

    NetworkShape shape_;
    LayerSet layers_;
};

double squared_norm(const LayerSet& set);
void scale(LayerSet& set, double factor);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam(const QNetwork& net, AdamConfig config = {});

    void step(QNetwork& net, const LayerSet& grads);
    long long steps() const { return t_; }

private:
    AdamConfig config_;
    LayerSet m_;
    LayerSet v_;
    long long t_ = 0;
};

}  // namespace flipper
