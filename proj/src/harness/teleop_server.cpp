// Copyright 2026 The sctune Authors
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

#include "sctune/harness/teleop_server.hpp"

#include <chrono>
#include <deque>
#include <stdexcept>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/asio/thread_pool.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace sctune::harness {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

// Pending outgoing frames beyond this are dropped for slow clients.
constexpr std::size_t kMaxQueuedFrames = 256;

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, std::unique_ptr<TeleopSession> session,
             const ServeOptions& options, const EpisodeHandler& on_episode,
             asio::thread_pool& workers)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        session_(std::move(session)),
        options_(options),
        on_episode_(on_episode),
        workers_(workers) {}

  void start() {
    ws_.text(true);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->send(self->session_->state_frame());
      self->read();
      if (!self->options_.lockstep) {
        self->next_tick_ = std::chrono::steady_clock::now();
        self->schedule_tick();
      }
    });
  }

  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      self->timer_.cancel();
      if (self->open_) {
        self->open_ = false;
        self->ws_.async_close(websocket::close_code::going_away, [self](beast::error_code) {});
      }
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        // Disconnect: the active episode, if any, is discarded with the session.
        self->open_ = false;
        self->timer_.cancel();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (!self->ws_.got_text()) {
        self->send(error_frame("binary frames are not supported"));
      } else {
        self->handle(text);
      }
      self->read();
    });
  }

  void handle(const std::string& text) {
    const bool was_active = session_->status() == TeleopSession::Status::kActive;
    TeleopSession::Reply reply = session_->handle_message(text);
    for (auto& f : reply.frames) send(std::move(f));
    if (reply.finished) dispatch_metrics(std::move(*reply.finished));
    // Lockstep: every accepted cmd during an episode is one control period. A
    // cmd is the only frame that is accepted silently.
    if (options_.lockstep && was_active &&
        session_->status() == TeleopSession::Status::kActive && reply.frames.empty() &&
        !reply.finished) {
      send(session_->tick());
    }
  }

  void dispatch_metrics(EpisodeRecord record) {
    auto self = shared_from_this();
    asio::post(workers_, [self, record = std::move(record)] {
      std::string frame;
      try {
        frame = self->on_episode_(record);
      } catch (const std::exception& e) {
        frame = error_frame(std::string("metrics failed: ") + e.what());
      }
      asio::post(self->ws_.get_executor(),
                 [self, frame = std::move(frame)]() mutable { self->send(std::move(frame)); });
    });
  }

  void schedule_tick() {
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / options_.tick_rate));
    next_tick_ += period;
    const auto now = std::chrono::steady_clock::now();
    // After a stall, resynchronize instead of bursting missed ticks.
    if (next_tick_ < now) next_tick_ = now;
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || !self->open_) return;
      self->send(self->session_->tick());
      self->schedule_tick();
    });
  }

  void send(std::string frame) {
    if (!open_) return;
    if (queue_.size() >= kMaxQueuedFrames) return;
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) write_front();
  }

  void write_front() {
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->open_ = false;
                        self->timer_.cancel();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write_front();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::unique_ptr<TeleopSession> session_;
  const ServeOptions& options_;
  const EpisodeHandler& on_episode_;
  asio::thread_pool& workers_;
  std::chrono::steady_clock::time_point next_tick_;
  bool open_ = false;
};

}  // namespace

struct TeleopServer::Impl {
  ServeOptions options;
  SessionFactory factory;
  EpisodeHandler on_episode;
  asio::io_context io{1};
  asio::thread_pool workers{1};
  tcp::acceptor acceptor{io};
  asio::signal_set signals{io};
  std::vector<std::weak_ptr<Connection>> connections;
  std::uint64_t next_id = 1;
  unsigned short port = 0;

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      try {
        auto conn = std::make_shared<Connection>(std::move(socket), factory(next_id++), options,
                                                 on_episode, workers);
        connections.push_back(conn);
        conn->start();
      } catch (const std::exception&) {
        // A failed session only costs this connection.
      }
      accept();
    });
  }
};

TeleopServer::TeleopServer(ServeOptions options, SessionFactory factory,
                           EpisodeHandler on_episode)
    : impl_(std::make_unique<Impl>()) {
  if (!(options.tick_rate > 0.0)) throw std::invalid_argument("tick rate must be positive");
  if (!factory || !on_episode) throw std::invalid_argument("teleop server needs handlers");
  impl_->options = std::move(options);
  impl_->factory = std::move(factory);
  impl_->on_episode = std::move(on_episode);
  const tcp::endpoint endpoint(asio::ip::make_address(impl_->options.address),
                               impl_->options.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
  impl_->port = impl_->acceptor.local_endpoint().port();
  impl_->accept();
  if (impl_->options.stop_on_signal) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
}

TeleopServer::~TeleopServer() {
  stop();
  impl_->workers.join();
}

unsigned short TeleopServer::port() const { return impl_->port; }

void TeleopServer::run() { impl_->io.run(); }

void TeleopServer::stop() {
  asio::post(impl_->io, [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    for (auto& weak : impl->connections) {
      if (auto conn = weak.lock()) conn->close();
    }
    impl->connections.clear();
    impl->signals.cancel(ec);
  });
}

void serve_teleop(const ServeOptions& options, SessionFactory factory,
                  EpisodeHandler on_episode) {
  TeleopServer server(options, std::move(factory), std::move(on_episode));
  server.run();
}

}  // namespace sctune::harness
