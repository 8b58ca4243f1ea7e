#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "flipper/session.hpp"

namespace flipper {

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8765;  // 0 picks a free port
    EnvConfig env;
    EvalCourse course = EvalCourse::single_step_04;
    SessionMode mode = SessionMode::teleop;
    std::filesystem::path record_dir;
    std::shared_ptr<const QNetwork> policy;
    // Tick period is env.dt / speed.
    double speed = 1.0;
};

// Websocket service: one SessionCore per connection, ticking at the decision-step cadence. All
// sessions run on a single I/O thread; the registry only tracks live session ids.
class WsServer {
public:
    explicit WsServer(ServerOptions options);
    ~WsServer();

    WsServer(const WsServer&) = delete;
    WsServer& operator=(const WsServer&) = delete;

    // Binds immediately; throws std::runtime_error on bind failure.
    unsigned short port() const;
    // Blocks until stop().
    void run();
    // Safe from any thread.
    void stop();

    std::size_t session_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace flipper
