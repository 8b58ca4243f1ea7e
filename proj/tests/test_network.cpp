#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "flipper/network.hpp"
#include "flipper/rng.hpp"

using namespace flipper;

namespace {

const NetworkShape kMini{1, 5, 4, 6, 3, 9};  // 4 inputs

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
    }
    return m;
}

void randomize_biases(QNetwork& net, Rng& rng) {
    for (auto& l : net.layers()) {
        for (int i = 0; i < l.bias.size(); ++i) l.bias[i] = rng.uniform(-0.3, 0.3);
    }
}

// Plain loops over the layer parameters.
Eigen::VectorXd naive_forward(const QNetwork& net, const Eigen::VectorXd& x) {
    const auto dense = [](const Dense& l, const std::vector<double>& in, bool act) {
        std::vector<double> out(static_cast<std::size_t>(l.weights.rows()));
        for (int i = 0; i < l.weights.rows(); ++i) {
            long double s = l.bias[i];
            for (int j = 0; j < l.weights.cols(); ++j) s += static_cast<long double>(l.weights(i, j)) * in[static_cast<std::size_t>(j)];
            const double v = static_cast<double>(s);
            out[static_cast<std::size_t>(i)] = act && v < 0.0 ? 0.01 * v : v;
        }
        return out;
    };
    const int n = net.shape().n;
    std::vector<double> terrain(x.data(), x.data() + n);
    auto h = dense(net.layer(QNetwork::encoder1), dense(net.layer(QNetwork::encoder0), terrain, true), true);
    for (int i = 0; i < 3; ++i) h.push_back(x[n + i]);
    const auto f = dense(net.layer(QNetwork::fusion), h, true);
    const auto v = dense(net.layer(QNetwork::value1), dense(net.layer(QNetwork::value0), f, true), false);
    const auto a = dense(net.layer(QNetwork::advantage1), dense(net.layer(QNetwork::advantage0), f, true), false);
    double mean = 0.0;
    for (double e : a) mean += e;
    mean /= static_cast<double>(a.size());
    Eigen::VectorXd q(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) q[static_cast<Eigen::Index>(i)] = v[0] + a[i] - mean;
    return q;
}

}  // namespace

TEST(Network, LayerShapes) {
    QNetwork net;
    net.initialize(1);
    const auto& l = net.layers();
    ASSERT_EQ(l.size(), 7u);
    EXPECT_EQ(l[QNetwork::encoder0].name, "encoder.0");
    EXPECT_EQ(l[QNetwork::encoder0].weights.rows(), 64);
    EXPECT_EQ(l[QNetwork::encoder0].weights.cols(), 15);
    EXPECT_EQ(l[QNetwork::fusion].weights.cols(), 67);
    EXPECT_EQ(l[QNetwork::value1].weights.rows(), 1);
    EXPECT_EQ(l[QNetwork::advantage1].weights.rows(), 9);
    EXPECT_EQ(l[QNetwork::advantage0].weights.rows(), 32);
    EXPECT_EQ(net.parameter_count(), 15u * 64 + 64 + 64 * 64 + 64 + 67 * 64 + 64 + 2 * (64 * 32 + 32) + 33 + 33 * 9);
}

TEST(Network, InitBounds) {
    QNetwork net;
    net.initialize(3);
    for (const auto& l : net.layers()) {
        const double bound = std::sqrt(6.0 / static_cast<double>(l.weights.rows() + l.weights.cols()));
        EXPECT_LE(l.weights.cwiseAbs().maxCoeff(), bound);
        EXPECT_GT(l.weights.cwiseAbs().maxCoeff(), 0.5 * bound);
        EXPECT_EQ(l.bias.cwiseAbs().maxCoeff(), 0.0);
    }
    QNetwork again;
    again.initialize(3);
    EXPECT_EQ(net.forward(Eigen::VectorXd::Ones(18)), again.forward(Eigen::VectorXd::Ones(18)));
}

TEST(Network, ZeroParametersGiveZeroQ) {
    QNetwork net;
    const auto q = net.forward(Eigen::VectorXd::Random(18));
    EXPECT_EQ(q, Eigen::VectorXd::Zero(9));
}

TEST(Network, DuelingCombinationStub) {
    QNetwork net;  // zero weights
    net.layer(QNetwork::value1).bias[0] = 1.0;
    net.layer(QNetwork::advantage1).bias[0] = 1.0;
    net.layer(QNetwork::advantage1).bias[1] = -1.0;
    Eigen::VectorXd expected = Eigen::VectorXd::Ones(9);
    expected[0] = 2.0;
    expected[1] = 0.0;
    EXPECT_EQ(net.forward(Eigen::VectorXd::Zero(18)), expected);
}

TEST(Network, DuelingShiftInvariance) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        QNetwork net;
        net.initialize(static_cast<std::uint64_t>(trial));
        randomize_biases(net, rng);
        const Eigen::MatrixXd x = random_matrix(18, 8, rng);
        const Eigen::MatrixXd q0 = net.forward_batch(x);
        const double c = rng.uniform(-100, 100);
        net.layer(QNetwork::advantage1).bias.array() += c;
        EXPECT_LE((net.forward_batch(x) - q0).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Network, ArgmaxFollowsAdvantage) {
    Rng rng(6);
    QNetwork net;
    net.initialize(6);
    randomize_biases(net, rng);
    const Eigen::VectorXd x = random_matrix(18, 1, rng).col(0);
    const Eigen::VectorXd q0 = net.forward(x);
    net.layer(QNetwork::value1).bias[0] += 37.0;
    const Eigen::VectorXd q1 = net.forward(x);
    Eigen::Index a0, a1;
    q0.maxCoeff(&a0);
    q1.maxCoeff(&a1);
    EXPECT_EQ(a0, a1);
}

TEST(Network, ForwardMatchesNaive) {
    Rng rng(7);
    QNetwork net;
    net.initialize(7);
    randomize_biases(net, rng);
    for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd x = random_matrix(18, 1, rng, 2.0).col(0);
        EXPECT_LE((net.forward(x) - naive_forward(net, x)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Network, BatchMatchesSingle) {
    Rng rng(8);
    QNetwork net;
    net.initialize(8);
    const Eigen::MatrixXd x = random_matrix(18, 16, rng);
    const Eigen::MatrixXd q = net.forward_batch(x);
    for (int j = 0; j < 16; ++j) EXPECT_LE((q.col(j) - net.forward(Eigen::VectorXd(x.col(j)))).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Network, WidthMismatchThrows) {
    QNetwork net;
    EXPECT_THROW(net.forward(Eigen::VectorXd::Zero(17)), std::invalid_argument);
    EXPECT_THROW(net.forward(std::vector<double>(19, 0.0)), std::invalid_argument);
}

TEST(Network, BackpropMatchesFiniteDifferences) {
    Rng rng(11);
    QNetwork net(kMini);
    net.initialize(11);
    randomize_biases(net, rng);
    const Eigen::MatrixXd x = random_matrix(4, 5, rng, 1.5);
    const Eigen::MatrixXd dq = random_matrix(9, 5, rng);
    const auto f = [&](const QNetwork& n) { return (dq.array() * n.forward_batch(x).array()).sum(); };
    const LayerSet g = net.backward(x, dq);
    const double h = 1e-4;
    double worst = 0.0;
    int checked = 0;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        auto check = [&](double& p, double analytic) {
            const double saved = p;
            p = saved + h;
            const double up = f(net);
            p = saved - h;
            const double down = f(net);
            p = saved;
            const double fd = (up - down) / (2 * h);
            worst = std::max(worst, std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-7}));
            ++checked;
        };
        Dense& layer = net.layers()[l];
        for (int i = 0; i < layer.weights.rows(); ++i) {
            for (int j = 0; j < layer.weights.cols(); ++j) check(layer.weights(i, j), g[l].weights(i, j));
            check(layer.bias[i], g[l].bias[i]);
        }
    }
    EXPECT_EQ(static_cast<std::size_t>(checked), net.parameter_count());
    EXPECT_LT(worst, 1e-4);
}

TEST(Network, AdamZeroGradientLeavesParameters) {
    QNetwork net;
    net.initialize(2);
    const QNetwork before = net;
    Adam adam(net);
    adam.step(net, net.zeros_like());
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        EXPECT_EQ(net.layers()[l].weights, before.layers()[l].weights);
        EXPECT_EQ(net.layers()[l].bias, before.layers()[l].bias);
    }
    EXPECT_EQ(adam.steps(), 1);
}

TEST(Network, AdamFirstStepMovesByLearningRate) {
    // bias-corrected first step is lr * sign(g)
    QNetwork net(kMini);
    Adam adam(net, AdamConfig{0.01});
    LayerSet g = net.zeros_like();
    g[0].bias[0] = 3.0;
    g[0].bias[1] = -0.5;
    adam.step(net, g);
    EXPECT_NEAR(net.layers()[0].bias[0], -0.01, 1e-9);
    EXPECT_NEAR(net.layers()[0].bias[1], 0.01, 1e-9);
}

TEST(Network, NormAndScale) {
    QNetwork net(kMini);
    LayerSet g = net.zeros_like();
    g[2].weights(0, 0) = 3.0;
    g[5].bias[1] = 4.0;
    EXPECT_EQ(squared_norm(g), 25.0);
    scale(g, 0.5);
    EXPECT_EQ(squared_norm(g), 6.25);
}
