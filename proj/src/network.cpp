#include "flipper/network.hpp"

#include <cmath>
#include <stdexcept>

#include "flipper/rng.hpp"

namespace flipper {
namespace {

Eigen::MatrixXd leaky(const Eigen::MatrixXd& z) { return z.cwiseMax(kLeakySlope * z); }

Eigen::MatrixXd leaky_grad(const Eigen::MatrixXd& z, const Eigen::MatrixXd& upstream) {
    return upstream.array() * (z.array() > 0.0).select(Eigen::MatrixXd::Ones(z.rows(), z.cols()), kLeakySlope).array();
}

Eigen::MatrixXd affine(const Dense& l, const Eigen::MatrixXd& x) {
    return (l.weights * x).colwise() + l.bias;
}

Dense make_dense(std::string name, int in, int out) {
    if (in < 1 || out < 1) throw std::invalid_argument("layer widths must be positive");
    return {std::move(name), Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
}

}  // namespace

struct QNetwork::Activations {
    Eigen::MatrixXd z0, h0, z1, h1, f, z2, s, zv0, hv0, v, za0, ha0, a, q;
};

QNetwork::QNetwork(NetworkShape shape) : shape_(shape) {
    if (shape.n < 1 || shape.actions < 1) throw std::invalid_argument("network needs inputs and actions");
    layers_.push_back(make_dense("encoder.0", shape.n, shape.encoder1));
    layers_.push_back(make_dense("encoder.1", shape.encoder1, shape.encoder2));
    layers_.push_back(make_dense("fusion", shape.encoder2 + kRobotFeatures, shape.fusion));
    layers_.push_back(make_dense("value.0", shape.fusion, shape.head));
    layers_.push_back(make_dense("value.1", shape.head, 1));
    layers_.push_back(make_dense("advantage.0", shape.fusion, shape.head));
    layers_.push_back(make_dense("advantage.1", shape.head, shape.actions));
}

void QNetwork::initialize(std::uint64_t seed) {
    Rng rng(seed);
    for (Dense& l : layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(l.weights.rows() + l.weights.cols()));
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = rng.uniform(-limit, limit);
        }
        l.bias.setZero();
    }
}

std::size_t QNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const Dense& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

void QNetwork::run(const Eigen::MatrixXd& x, Activations& a) const {
    if (x.rows() != shape_.input_width()) throw std::invalid_argument("observation width does not match the network");
    a.z0 = affine(layers_[encoder0], x.topRows(shape_.n));
    a.h0 = leaky(a.z0);
    a.z1 = affine(layers_[encoder1], a.h0);
    a.h1 = leaky(a.z1);
    a.f.resize(a.h1.rows() + kRobotFeatures, x.cols());
    a.f << a.h1, x.bottomRows(kRobotFeatures);
    a.z2 = affine(layers_[fusion], a.f);
    a.s = leaky(a.z2);
    a.zv0 = affine(layers_[value0], a.s);
    a.hv0 = leaky(a.zv0);
    a.v = affine(layers_[value1], a.hv0);
    a.za0 = affine(layers_[advantage0], a.s);
    a.ha0 = leaky(a.za0);
    a.a = affine(layers_[advantage1], a.ha0);
    const Eigen::RowVectorXd mean = a.a.colwise().mean();
    a.q = a.a;
    a.q.rowwise() += a.v.row(0) - mean;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
    Activations a;
    run(inputs, a);
    return a.q;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input) const { return forward_batch(input); }

Eigen::VectorXd QNetwork::forward(const std::vector<double>& input) const {
    return forward(Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size())));
}

LayerSet QNetwork::zeros_like() const {
    LayerSet out = layers_;
    for (Dense& l : out) {
        l.weights.setZero();
        l.bias.setZero();
    }
    return out;
}

LayerSet QNetwork::backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& dq) const {
    Activations a;
    run(inputs, a);
    if (dq.rows() != a.q.rows() || dq.cols() != a.q.cols()) throw std::invalid_argument("dq shape mismatch");
    LayerSet g = zeros_like();
    const auto fill = [&](Layer l, const Eigen::MatrixXd& dz, const Eigen::MatrixXd& in) {
        g[l].weights = dz * in.transpose();
        g[l].bias = dz.rowwise().sum();
    };

    const Eigen::MatrixXd dv = dq.colwise().sum();
    Eigen::MatrixXd da = dq;
    da.rowwise() -= dq.colwise().mean();

    fill(advantage1, da, a.ha0);
    const Eigen::MatrixXd dza0 = leaky_grad(a.za0, layers_[advantage1].weights.transpose() * da);
    fill(advantage0, dza0, a.s);
    fill(value1, dv, a.hv0);
    const Eigen::MatrixXd dzv0 = leaky_grad(a.zv0, layers_[value1].weights.transpose() * dv);
    fill(value0, dzv0, a.s);

    const Eigen::MatrixXd ds =
        layers_[value0].weights.transpose() * dzv0 + layers_[advantage0].weights.transpose() * dza0;
    const Eigen::MatrixXd dz2 = leaky_grad(a.z2, ds);
    fill(fusion, dz2, a.f);
    const Eigen::MatrixXd df = layers_[fusion].weights.transpose() * dz2;
    const Eigen::MatrixXd dz1 = leaky_grad(a.z1, df.topRows(a.h1.rows()));
    fill(encoder1, dz1, a.h0);
    const Eigen::MatrixXd dz0 = leaky_grad(a.z0, layers_[encoder1].weights.transpose() * dz1);
    fill(encoder0, dz0, inputs.topRows(shape_.n));
    return g;
}

double squared_norm(const LayerSet& set) {
    double s = 0.0;
    for (const Dense& l : set) s += l.weights.squaredNorm() + l.bias.squaredNorm();
    return s;
}

void scale(LayerSet& set, double factor) {
    for (Dense& l : set) {
        l.weights *= factor;
        l.bias *= factor;
    }
}

Adam::Adam(const QNetwork& net, AdamConfig config) : config_(config), m_(net.zeros_like()), v_(net.zeros_like()) {}

void Adam::step(QNetwork& net, const LayerSet& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    const auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
        v = config_.beta2 * v + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
        param.array() -= config_.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
    };
    auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        update(layers[i].weights, grads[i].weights, m_[i].weights, v_[i].weights);
        update(layers[i].bias, grads[i].bias, m_[i].bias, v_[i].bias);
    }
}

}  // namespace flipper
