#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "flipper/network.hpp"
#include "json.hpp"

namespace flipper {

inline constexpr const char* kCheckpointVersion = "flipper-qnet/1";

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {version, arch: {N, widths}, config, layers: [{name, shape: [out, in], weights (row-major), bias}]}
nlohmann::json checkpoint_json(const QNetwork& net, const nlohmann::json& config_echo = nlohmann::json::object());
// Throws CheckpointError on version mismatch, missing fields or inconsistent shapes, and when
// expected_n is given and differs from the stored N.
QNetwork network_from_checkpoint(const nlohmann::json& j, std::optional<int> expected_n = std::nullopt);

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path,
                     const nlohmann::json& config_echo = nlohmann::json::object());
QNetwork load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_n = std::nullopt);

}  // namespace flipper
