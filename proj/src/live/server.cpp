#include "mtirl/live/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <iostream>
#include <thread>

namespace mtirl::live {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

// Shared state behind every connection: the sessions and their agent loops.
class Hub {
public:
    Hub(std::filesystem::path state_dir, std::ostream& log) : state_dir_(std::move(state_dir)), log_(log) {}

    SessionRegistry& registry() { return registry_; }

    http::response<http::string_body> handle(const http::request<http::string_body>& req);

    void run_agent(const std::shared_ptr<Session>& session);
    void stop_all();

private:
    json describe(const Session& s) const;
    void agent_loop(std::shared_ptr<Session> session);

    SessionRegistry registry_;
    std::filesystem::path state_dir_;
    std::ostream& log_;
    std::mutex mu_;
    std::map<std::string, std::thread> agents_;
};

http::response<http::string_body> reply(const http::request<http::string_body>& req, http::status status,
                                        const json& body) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, "application/json");
    res.keep_alive(req.keep_alive());
    res.body() = body.dump();
    res.prepare_payload();
    return res;
}

json Hub::describe(const Session& s) const {
    json j = to_json(s.summary());
    json trainers = json::object();
    const TrustStore store = s.trust();
    for (const auto& [id, rec] : store.records()) {
        const TrustSnapshot snap = snapshot_of(rec);
        trainers[id] = {{"trust", snap.trust}, {"alpha", snap.alpha}, {"beta", snap.beta},
                        {"uncertainty", snap.uncertainty}};
    }
    j["trainers"] = std::move(trainers);
    j["connected"] = s.roster();
    j["deadline_ms"] = s.options().deadline.count();
    j["archive_size"] = s.archive_size();
    return j;
}

void Hub::agent_loop(std::shared_ptr<Session> session) {
    try {
        while (session->state() == Lifecycle::running) {
            session->step();
        }
        session->save(state_dir_ / session->id());
    } catch (const std::exception& e) {
        log_ << "session " << session->id() << ": " << e.what() << '\n';
        if (session->state() == Lifecycle::running) session->pause();
    }
}

void Hub::run_agent(const std::shared_ptr<Session>& session) {
    std::lock_guard lock(mu_);
    auto it = agents_.find(session->id());
    if (it != agents_.end()) {
        // A previous loop may still be finishing its last step.
        if (it->second.joinable()) it->second.join();
        agents_.erase(it);
    }
    session->start();
    agents_.emplace(session->id(), std::thread(&Hub::agent_loop, this, session));
}

void Hub::stop_all() {
    for (const auto& s : registry_.list()) {
        if (s->state() == Lifecycle::running) {
            try {
                s->pause();
            } catch (const std::logic_error&) {
                // finished meanwhile
            }
        }
    }
    std::lock_guard lock(mu_);
    for (auto& [id, t] : agents_) {
        if (t.joinable()) t.join();
    }
    agents_.clear();
}

http::response<http::string_body> Hub::handle(const http::request<http::string_body>& req) {
    const std::string target(req.target());
    const std::string path = target.substr(0, target.find('?'));
    auto error = [&](http::status st, const std::string& msg) { return reply(req, st, {{"error", msg}}); };

    if (path == "/sessions") {
        if (req.method() == http::verb::post) {
            SessionOptions options;
            try {
                const json body = req.body().empty() ? json() : json::parse(req.body());
                options = session_options_from_json(body);
            } catch (const std::exception& e) {
                return error(http::status::bad_request, e.what());
            }
            const std::string id = registry_.open(std::move(options));
            return reply(req, http::status::created, describe(*registry_.find(id)));
        }
        if (req.method() == http::verb::get) {
            json list = json::array();
            for (const auto& s : registry_.list()) list.push_back(to_json(s->summary()));
            return reply(req, http::status::ok, {{"sessions", list}});
        }
        return error(http::status::method_not_allowed, "use GET or POST");
    }

    const std::string prefix = "/sessions/";
    if (path.rfind(prefix, 0) != 0) return error(http::status::not_found, "no such endpoint");
    const std::string rest = path.substr(prefix.size());
    const auto slash = rest.find('/');
    const std::string id = rest.substr(0, slash);
    const std::string action = slash == std::string::npos ? "" : rest.substr(slash + 1);
    const auto session = registry_.find(id);
    if (!session) return error(http::status::not_found, "unknown session '" + id + "'");

    if (action.empty()) {
        if (req.method() != http::verb::get) return error(http::status::method_not_allowed, "use GET");
        return reply(req, http::status::ok, describe(*session));
    }
    if (req.method() != http::verb::post) return error(http::status::method_not_allowed, "use POST");
    try {
        if (action == "start" || action == "resume") {
            const Lifecycle st = session->state();
            if (action == "start" && st != Lifecycle::lobby) {
                return error(http::status::conflict, "session is " + std::string(to_string(st)));
            }
            if (action == "resume" && st != Lifecycle::paused) {
                return error(http::status::conflict, "session is " + std::string(to_string(st)));
            }
            run_agent(session);
        } else if (action == "pause") {
            session->pause();
        } else {
            return error(http::status::not_found, "no such action '" + action + "'");
        }
    } catch (const std::logic_error& e) {
        return error(http::status::conflict, e.what());
    }
    return reply(req, http::status::ok, describe(*session));
}

// One trainer connection.
class TrainerConnection : public std::enable_shared_from_this<TrainerConnection> {
public:
    TrainerConnection(tcp::socket&& socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&TrainerConnection::on_accept, shared_from_this()));
    }

    // Thread-safe: hops onto the connection's strand.
    void send(std::string text) {
        net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
            self->queue_.push_back(std::move(text));
            if (self->queue_.size() == 1) self->do_write();
        });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        do_read();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&TrainerConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            cleanup();
            return;
        }
        const std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        handle(text);
        do_read();
    }

    void handle(const std::string& text) {
        Message msg;
        try {
            msg = decode(text);
        } catch (const ProtocolError&) {
            send(encode(FeedbackRejectedMessage{0, trainer_, RejectReason::malformed}));
            return;
        }
        if (const auto* join = std::get_if<JoinMessage>(&msg)) {
            on_join(*join);
        } else if (const auto* fb = std::get_if<FeedbackMessage>(&msg)) {
            on_feedback(*fb);
        } else {
            send(encode(FeedbackRejectedMessage{0, trainer_, RejectReason::malformed}));
        }
    }

    void on_join(const JoinMessage& join) {
        auto session = hub_.registry().find(join.session_id);
        if (!session) {
            send(encode(FeedbackRejectedMessage{0, join.trainer_id, RejectReason::unknown_session}));
            return;
        }
        cleanup();
        std::weak_ptr<TrainerConnection> weak = shared_from_this();
        session_ = session;
        trainer_ = join.trainer_id;
        token_ = session->attach(join.trainer_id, [weak](const Message& m) {
            if (auto self = weak.lock()) self->send(encode(m));
        });
    }

    void on_feedback(const FeedbackMessage& fb) {
        RejectReason reason = RejectReason::unknown_trainer;
        if (session_ && fb.session_id != session_->id()) {
            reason = RejectReason::unknown_session;
        } else if (session_ && fb.trainer_id == trainer_) {
            const SubmitResult r = session_->submit_feedback(fb.query_id, fb.trainer_id, fb.value);
            if (r.accepted) return;
            reason = r.reason;
        }
        send(encode(FeedbackRejectedMessage{fb.query_id, fb.trainer_id, reason}));
    }

    void cleanup() {
        if (session_ && token_) session_->detach(*token_, trainer_);
        session_.reset();
        token_.reset();
    }

    void do_write() {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()),
                        beast::bind_front_handler(&TrainerConnection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            queue_.clear();
            return;
        }
        queue_.pop_front();
        if (!queue_.empty()) do_write();
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    Hub& hub_;
    std::shared_ptr<Session> session_;
    TrainerId trainer_;
    std::optional<std::size_t> token_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    HttpConnection(tcp::socket&& socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

    void run() {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::do_read, shared_from_this()));
    }

private:
    void do_read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            beast::error_code ignored;
            stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
            return;
        }
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            if (req_.target() != "/ws") {
                beast::error_code ignored;
                stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
                return;
            }
            std::make_shared<TrainerConnection>(stream_.release_socket(), hub_)->run(std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>(hub_.handle(req_));
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code wec, std::size_t) {
            if (!wec && res->keep_alive()) {
                self->do_read();
            } else {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
            }
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    Hub& hub_;
};

class Listener : public std::enable_shared_from_this<Listener> {
public:
    Listener(net::io_context& ioc, const tcp::endpoint& endpoint, Hub& hub)
        : ioc_(ioc), acceptor_(net::make_strand(ioc)), hub_(hub) {
        acceptor_.open(endpoint.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(endpoint);
        acceptor_.listen(net::socket_base::max_listen_connections);
    }

    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    void run() { do_accept(); }

    void close() {
        net::post(acceptor_.get_executor(), [self = shared_from_this()] {
            beast::error_code ignored;
            self->acceptor_.close(ignored);
        });
    }

private:
    void do_accept() {
        acceptor_.async_accept(net::make_strand(ioc_),
                               beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
    }

    void on_accept(beast::error_code ec, tcp::socket socket) {
        if (!ec) std::make_shared<HttpConnection>(std::move(socket), hub_)->run();
        if (acceptor_.is_open()) do_accept();
    }

    net::io_context& ioc_;
    tcp::acceptor acceptor_;
    Hub& hub_;
};

}  // namespace

struct Server::Impl {
    explicit Impl(ServerOptions o) : options(std::move(o)), hub(options.state_dir, std::cerr) {}

    ServerOptions options;
    Hub hub;
    net::io_context ioc;
    std::shared_ptr<Listener> listener;
    std::vector<std::thread> threads;
    bool running = false;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
    if (impl_->options.threads <= 0) throw std::invalid_argument("threads: must be positive");
}

Server::~Server() { stop(); }

SessionRegistry& Server::registry() { return impl_->hub.registry(); }

unsigned short Server::start() {
    auto& im = *impl_;
    const tcp::endpoint endpoint(net::ip::make_address(im.options.host), im.options.port);
    im.listener = std::make_shared<Listener>(im.ioc, endpoint, im.hub);
    im.listener->run();
    for (int i = 0; i < im.options.threads; ++i) {
        im.threads.emplace_back([&im] { im.ioc.run(); });
    }
    im.running = true;
    return im.listener->port();
}

void Server::stop() {
    auto& im = *impl_;
    if (!im.running) return;
    im.running = false;
    im.hub.stop_all();
    im.listener->close();
    im.ioc.stop();
    for (auto& t : im.threads) t.join();
    im.threads.clear();
}

int run_server(const ServerOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Server server(options);
        const unsigned short port = server.start();
        out << "listening on " << options.host << ':' << port << " (state dir " << options.state_dir.string()
            << ")\n"
            << std::flush;
        net::io_context signals_ctx;
        net::signal_set signals(signals_ctx, SIGINT, SIGTERM);
        signals.async_wait([](beast::error_code, int) {});
        signals_ctx.run();
        out << "shutting down\n";
        server.stop();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace mtirl::live
