#include "flipper/checkpoint.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "flipper/config.hpp"

namespace flipper {

nlohmann::json checkpoint_json(const QNetwork& net, const nlohmann::json& config_echo) {
    const NetworkShape& s = net.shape();
    nlohmann::json layers = nlohmann::json::array();
    for (const Dense& l : net.layers()) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(l.weights.size()));
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
        }
        layers.push_back({{"name", l.name},
                          {"shape", {l.weights.rows(), l.weights.cols()}},
                          {"weights", w},
                          {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    return {{"version", kCheckpointVersion},
            {"arch",
             {{"N", s.n},
              {"widths",
               {{"encoder", {s.encoder1, s.encoder2}}, {"fusion", s.fusion}, {"head", s.head}, {"actions", s.actions}}}}},
            {"config", config_echo},
            {"layers", layers}};
}

QNetwork network_from_checkpoint(const nlohmann::json& j, std::optional<int> expected_n) {
    try {
        if (!j.is_object() || !j.contains("version")) throw CheckpointError("checkpoint has no version tag");
        if (j.at("version") != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version " + j.at("version").dump());
        }
        const auto& arch = j.at("arch");
        NetworkShape s;
        s.n = arch.at("N").get<int>();
        const auto& w = arch.at("widths");
        s.encoder1 = w.at("encoder").at(0).get<int>();
        s.encoder2 = w.at("encoder").at(1).get<int>();
        s.fusion = w.at("fusion").get<int>();
        s.head = w.at("head").get<int>();
        s.actions = w.at("actions").get<int>();
        if (expected_n && *expected_n != s.n) {
            throw CheckpointError("checkpoint expects N = " + std::to_string(s.n) + " terrain bins, configured N = " +
                                  std::to_string(*expected_n));
        }
        QNetwork net(s);
        const auto& layers = j.at("layers");
        if (!layers.is_array() || layers.size() != net.layers().size()) throw CheckpointError("checkpoint layer count mismatch");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            Dense& l = net.layers()[i];
            const auto& src = layers[i];
            if (src.at("name") != l.name) throw CheckpointError("checkpoint layer " + std::to_string(i) + " is not " + l.name);
            const auto rows = src.at("shape").at(0).get<Eigen::Index>();
            const auto cols = src.at("shape").at(1).get<Eigen::Index>();
            const auto weights = src.at("weights").get<std::vector<double>>();
            const auto bias = src.at("bias").get<std::vector<double>>();
            if (rows != l.weights.rows() || cols != l.weights.cols() ||
                static_cast<Eigen::Index>(weights.size()) != rows * cols ||
                static_cast<Eigen::Index>(bias.size()) != rows) {
                throw CheckpointError("checkpoint layer " + l.name + " has inconsistent shape");
            }
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) l.weights(r, c) = weights[static_cast<std::size_t>(r * cols + c)];
                l.bias[r] = bias[static_cast<std::size_t>(r)];
            }
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    }
}

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path, const nlohmann::json& config_echo) {
    write_json_file(path, checkpoint_json(net, config_echo), -1);
}

QNetwork load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_n) {
    nlohmann::json j;
    try {
        j = read_json_file(path);
    } catch (const std::runtime_error& e) {
        throw CheckpointError(e.what());
    }
    return network_from_checkpoint(j, expected_n);
}

}  // namespace flipper
