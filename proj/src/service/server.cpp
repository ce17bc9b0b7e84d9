// Copyright 2026 The ILoSA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ilosa/service/server.hpp"

#include <algorithm>
#include <csignal>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "ilosa/policy/io.hpp"

namespace ilosa::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

constexpr double kTickPeriod = 0.01;  // s of wall-clock per tick at realtime factor 1

class StreamConnection;
using Subscribers = std::map<std::string, std::vector<std::weak_ptr<StreamConnection>>>;

class StreamConnection : public std::enable_shared_from_this<StreamConnection> {
 public:
  StreamConnection(tcp::socket socket, std::shared_ptr<Session> session, Api& api)
      : ws_(std::move(socket)), session_(std::move(session)), api_(api) {}

  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->send(message("hello", self->session_->describe()).dump());
      self->read();
    });
  }

  void send(std::string text) {
    if (!open_) return;
    // Drop state frames for slow readers instead of growing without bound.
    if (queue_.size() > 256) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

  const std::string& session_id() const { return session_->id(); }
  bool open() const { return open_; }

  void close() {
    if (!open_) return;
    open_ = false;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->open_ = false;
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->send(self->api_.handle_socket_message(*self->session_, text).dump());
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->open_ = false;
                        self->queue_.clear();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<Session> session_;
  Api& api_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool open_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Api& api, Subscribers& subs)
      : stream_(std::move(socket)), api_(api), subs_(subs) {}

  void start() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->dispatch();
                     });
  }

  void dispatch() {
    std::string target(req_.target());
    const auto q = target.find('?');
    const std::string path = q == std::string::npos ? target : target.substr(0, q);

    if (websocket::is_upgrade(req_)) {
      // /sessions/{id}/stream
      const std::string prefix = "/sessions/";
      const std::string suffix = "/stream";
      std::shared_ptr<Session> s;
      if (path.rfind(prefix, 0) == 0 && path.size() > prefix.size() + suffix.size() &&
          path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        s = api_.sessions().find(
            path.substr(prefix.size(), path.size() - prefix.size() - suffix.size()));
      }
      if (!s) {
        respond({404, "application/json",
                 error_message("unknown_session", path).dump()});
        return;
      }
      stream_.expires_never();
      auto conn = std::make_shared<StreamConnection>(stream_.release_socket(), s, api_);
      subs_[s->id()].push_back(conn);
      conn->accept(std::move(req_));
      return;
    }

    ApiRequest r;
    r.method = std::string(req_.method_string());
    r.path = path;
    r.body = req_.body();
    respond(api_.handle(r));
  }

  void respond(const ApiResponse& a) {
    auto res = std::make_shared<http::response<http::string_body>>(
        static_cast<http::status>(a.status), req_.version());
    res->set(http::field::server, "ilosa");
    res->set(http::field::content_type, a.content_type);
    res->set(http::field::access_control_allow_origin, "*");
    res->keep_alive(req_.keep_alive());
    res->body() = a.body;
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  Api& api_;
  Subscribers& subs_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct Server::Impl {
  Impl(SessionManager& sessions, ServerOptions opt)
      : manager(sessions), api(sessions), options(std::move(opt)), acceptor(io), timer(io) {
    if (!(options.realtime_factor > 0.0)) throw InvalidArgument("realtime_factor must be > 0");
    beast::error_code ec;
    const auto address = asio::ip::make_address(options.address, ec);
    if (ec) throw InvalidArgument("bad listen address '" + options.address + "'");
    const tcp::endpoint endpoint(address, options.port);
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(endpoint, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw std::runtime_error("cannot listen on " + options.address + ":" +
                               std::to_string(options.port) + ": " + ec.message());
    }
    bound_port = acceptor.local_endpoint().port();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<HttpConnection>(std::move(socket), api, subscribers)->start();
      accept();
    });
  }

  // Ticks every running session at the nominal 100 Hz (scaled by the
  // realtime factor) and broadcasts the result.
  void schedule(std::chrono::steady_clock::time_point deadline) {
    timer.expires_at(deadline);
    timer.async_wait([this, deadline](beast::error_code ec) {
      if (ec || stopping) return;
      for (const auto& s : manager.sessions()) {
        const TickResult r = s->tick();
        if (r.state) broadcast(s->id(), to_json(*r.state).dump());
        if (r.error) {
          broadcast(s->id(), error_message("diverged", *r.error).dump());
          broadcast(s->id(), message("status", {{"id", s->id()}, {"status", "paused"}}).dump());
        }
      }
      prune();
      const auto step = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(kTickPeriod / options.realtime_factor));
      auto next = deadline + step;
      const auto now = std::chrono::steady_clock::now();
      if (next < now - 10 * step) next = now;  // fell far behind: resynchronize
      schedule(next);
    });
  }

  void broadcast(const std::string& id, const std::string& text) {
    const auto it = subscribers.find(id);
    if (it == subscribers.end()) return;
    for (const auto& w : it->second) {
      if (auto c = w.lock()) c->send(text);
    }
  }

  void prune() {
    for (auto it = subscribers.begin(); it != subscribers.end();) {
      auto& v = it->second;
      const bool gone = !manager.find(it->first);
      for (auto& w : v) {
        if (auto c = w.lock(); c && gone) c->close();
      }
      v.erase(std::remove_if(v.begin(), v.end(),
                             [](const std::weak_ptr<StreamConnection>& w) {
                               auto c = w.lock();
                               return !c || !c->open();
                             }),
              v.end());
      it = v.empty() ? subscribers.erase(it) : std::next(it);
    }
  }

  SessionManager& manager;
  Api api;
  ServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  unsigned short bound_port = 0;
  asio::steady_timer timer;
  Subscribers subscribers;
  bool stopping = false;
};

Server::Server(SessionManager& sessions, ServerOptions options)
    : impl_(std::make_unique<Impl>(sessions, std::move(options))) {}

Server::~Server() = default;

unsigned short Server::port() const { return impl_->bound_port; }

void Server::run() {
  asio::signal_set signals(impl_->io);
  if (impl_->options.handle_signals) {
    signals.add(SIGINT);
    signals.add(SIGTERM);
    signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  impl_->accept();
  impl_->schedule(std::chrono::steady_clock::now());
  impl_->io.run();
}

void Server::stop() {
  asio::post(impl_->io, [impl = impl_.get()] {
    impl->stopping = true;
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->timer.cancel();
    for (auto& [id, v] : impl->subscribers) {
      for (auto& w : v) {
        if (auto c = w.lock()) c->close();
      }
    }
    impl->io.stop();
  });
}

std::vector<std::string> Server::flush_logs() const {
  std::vector<std::string> written;
  if (impl_->options.log_dir.empty()) return written;
  namespace fs = std::filesystem;
  fs::create_directories(impl_->options.log_dir);
  for (const auto& s : impl_->manager.sessions()) {
    const fs::path base = fs::path(impl_->options.log_dir) / s->id();
    const std::string csv = base.string() + "_log.csv";
    std::ofstream(csv) << s->log_csv();
    written.push_back(csv);
    try {
      const std::string pol = base.string() + "_policy.json";
      std::ofstream(pol) << s->export_policy().dump(1);
      written.push_back(pol);
    } catch (const StateError&) {
      // untrained session: nothing to export
    }
  }
  return written;
}

}  // namespace ilosa::service
