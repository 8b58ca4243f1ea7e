#include "flipper/ws_server.hpp"

#include <chrono>
#include <deque>
#include <stdexcept>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace flipper {
namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

class Registry {
public:
    void add(const std::string& id) {
        std::lock_guard lock(mutex_);
        ids_.insert(id);
    }
    void remove(const std::string& id) {
        std::lock_guard lock(mutex_);
        ids_.erase(id);
    }
    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return ids_.size();
    }

private:
    mutable std::mutex mutex_;
    std::set<std::string> ids_;
};

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, SessionOptions options, std::chrono::nanoseconds period, Registry& registry)
        : ws_(std::move(socket)),
          timer_(ws_.get_executor()),
          id_(options.id),
          core_(std::move(options)),
          period_(period),
          registry_(registry) {}

    void start() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        registry_.add(id_);
        registered_ = true;
        read();
        schedule_tick();
    }

    void read() { ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this())); }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) return close();
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        bool restarted = false;
        for (auto& msg : core_.handle_text(text)) {
            restarted = restarted || msg.contains("terrain");
            send(msg);
        }
        // a fresh episode gets a full period before its first step
        if (restarted) schedule_tick();
        read();
    }

    void schedule_tick() {
        timer_.expires_after(period_);
        timer_.async_wait(beast::bind_front_handler(&Connection::on_tick, shared_from_this()));
    }

    void on_tick(beast::error_code ec) {
        if (ec || closed_) return;
        for (auto& msg : core_.tick()) send(msg);
        schedule_tick();
    }

    void send(const nlohmann::json& msg) {
        if (closed_) return;
        outbox_.push_back(msg.dump());
        if (outbox_.size() == 1) write_front();
    }

    void write_front() {
        ws_.text(true);
        ws_.async_write(asio::buffer(outbox_.front()),
                        beast::bind_front_handler(&Connection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) return close();
        outbox_.pop_front();
        if (!outbox_.empty()) write_front();
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        timer_.cancel();
        if (registered_) registry_.remove(id_);
    }

    websocket::stream<beast::tcp_stream> ws_;
    asio::steady_timer timer_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    std::string id_;
    SessionCore core_;
    std::chrono::nanoseconds period_;
    Registry& registry_;
    bool registered_ = false;
    bool closed_ = false;
};

}  // namespace

struct WsServer::Impl {
    explicit Impl(ServerOptions o) : options(std::move(o)), acceptor(ioc) {
        if (!(options.speed > 0.0)) throw std::invalid_argument("speed multiplier must be positive");
        beast::error_code ec;
        const tcp::endpoint endpoint(asio::ip::make_address(options.address, ec), options.port);
        if (ec) throw std::runtime_error("bad bind address " + options.address + ": " + ec.message());
        acceptor.open(endpoint.protocol(), ec);
        if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
        if (!ec) acceptor.bind(endpoint, ec);
        if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
        if (ec) throw std::runtime_error("cannot listen on " + options.address + ":" + std::to_string(options.port) + ": " + ec.message());
        period = std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::duration<double>(options.env.dt / options.speed));
    }

    void accept() {
        acceptor.async_accept(ioc, [this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            SessionOptions s;
            s.id = "session-" + std::to_string(++counter);
            s.env = options.env;
            s.default_course = options.course;
            s.default_mode = options.mode;
            s.record_dir = options.record_dir;
            s.policy = options.policy;
            std::make_shared<Connection>(std::move(socket), std::move(s), period, registry)->start();
            accept();
        });
    }

    ServerOptions options;
    asio::io_context ioc;
    tcp::acceptor acceptor;
    std::chrono::nanoseconds period{};
    Registry registry;
    int counter = 0;
};

WsServer::WsServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

WsServer::~WsServer() = default;

unsigned short WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::run() {
    impl_->accept();
    impl_->ioc.run();
}

void WsServer::stop() { impl_->ioc.stop(); }

std::size_t WsServer::session_count() const { return impl_->registry.size(); }

}  // namespace flipper
