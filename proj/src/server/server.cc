// Copyright 2026 The Residual Copilot Authors
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

#include "sa/server/server.h"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "sa/common/errors.h"

namespace sa::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Clock = std::chrono::steady_clock;

struct Server::Impl {
  Impl(const ServerOptions& o, std::shared_ptr<const SessionResources> r)
      : opts(o), resources(std::move(r)), acceptor(asio::make_strand(ioc)) {}

  void DoAccept();
  void LogBlinding(const BlindingEntry& e);
  void LogTicks(const TickStats& s);

  ServerOptions opts;
  std::shared_ptr<const SessionResources> resources;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::atomic<uint64_t> next_index{0};

  mutable std::mutex mu;
  std::vector<BlindingEntry> blinding;
  std::vector<TickStats> ticks;
  std::ofstream blinding_file;
};

namespace {

std::string SessionId(uint64_t index) { return "s" + std::to_string(index); }

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, Server::Impl* server, uint64_t index)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        server_(server),
        session_(SessionId(index), index, server->resources) {}

  void Run() {
    asio::dispatch(ws_.get_executor(),
                   beast::bind_front_handler(&Connection::OnRun, shared_from_this()));
  }

 private:
  void OnRun() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(beast::bind_front_handler(&Connection::OnAccept, shared_from_this()));
  }

  void OnAccept(beast::error_code ec) {
    if (ec) return;
    DoRead();
  }

  void DoRead() {
    ws_.async_read(buffer_,
                   beast::bind_front_handler(&Connection::OnRead, shared_from_this()));
  }

  void OnRead(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      FinishTicks();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    const bool was_running = session_.running();
    for (auto& reply : session_.HandleMessage(text)) Send(std::move(reply));
    SyncBlinding();
    if (was_running && !session_.running()) FinishTicks();
    if (session_.running() && !ticking_) StartTicking();
    DoRead();
  }

  void SyncBlinding() {
    const auto& log = session_.blinding_log();
    for (; blinding_logged_ < log.size(); ++blinding_logged_) {
      server_->LogBlinding(log[blinding_logged_]);
    }
  }

  std::chrono::nanoseconds Period() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double>(session_.dt()));
  }

  void StartTicking() {
    ticking_ = true;
    stats_ = TickStats{};
    stats_.session = session_.id();
    last_tick_ = Clock::now();
    next_ = last_tick_ + Period();
    ScheduleTick();
  }

  void ScheduleTick() {
    timer_.expires_at(next_);
    timer_.async_wait(beast::bind_front_handler(&Connection::OnTick, shared_from_this()));
  }

  void OnTick(beast::error_code ec) {
    if (ec || closed_ || !session_.running()) {
      ticking_ = false;
      return;
    }
    const auto now = Clock::now();
    const double period = std::chrono::duration<double>(now - last_tick_).count();
    last_tick_ = now;
    ++stats_.ticks;
    stats_.mean_period_s += (period - stats_.mean_period_s) / static_cast<double>(stats_.ticks);
    stats_.max_period_s = std::max(stats_.max_period_s, period);
    if (std::abs(period - session_.dt()) > 0.1 * session_.dt()) ++stats_.late_ticks;

    for (auto& frame : session_.Tick()) Send(std::move(frame));
    if (!session_.running()) {
      ticking_ = false;
      FinishTicks();
      return;
    }
    next_ += Period();
    // After a long stall, resync instead of bursting to catch up.
    if (next_ + 5 * Period() < now) next_ = now + Period();
    ScheduleTick();
  }

  void FinishTicks() {
    if (stats_.ticks > 0) server_->LogTicks(stats_);
    stats_ = TickStats{};
    stats_.session = session_.id();
  }

  void Send(std::string msg) {
    if (closed_) return;
    queue_.push_back(std::move(msg));
    if (!writing_) DoWrite();
  }

  void DoWrite() {
    writing_ = true;
    ws_.async_write(asio::buffer(queue_.front()),
                    beast::bind_front_handler(&Connection::OnWrite, shared_from_this()));
  }

  void OnWrite(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      writing_ = false;
      queue_.clear();
      timer_.cancel();
      return;
    }
    queue_.pop_front();
    if (queue_.empty()) {
      writing_ = false;
    } else {
      DoWrite();
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  Server::Impl* server_;
  Session session_;

  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closed_ = false;
  bool ticking_ = false;
  Clock::time_point next_;
  Clock::time_point last_tick_;
  TickStats stats_;
  size_t blinding_logged_ = 0;
};

}  // namespace

void Server::Impl::DoAccept() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec,
                                                       tcp::socket socket) {
    if (ec == asio::error::operation_aborted) return;
    if (!ec) {
      std::make_shared<Connection>(std::move(socket), this, next_index++)->Run();
    }
    DoAccept();
  });
}

void Server::Impl::LogBlinding(const BlindingEntry& e) {
  std::lock_guard<std::mutex> lock(mu);
  blinding.push_back(e);
  if (blinding_file.is_open()) {
    nlohmann::json j = {{"session", e.session},
                        {"label", e.label},
                        {"slot", CopilotSlotName(e.slot)}};
    blinding_file << j.dump() << "\n";
    blinding_file.flush();
  }
}

void Server::Impl::LogTicks(const TickStats& s) {
  std::lock_guard<std::mutex> lock(mu);
  ticks.push_back(s);
  if (opts.log_timing) {
    std::clog << "session " << s.session << ": " << s.ticks << " ticks, "
              << s.late_ticks << " off period by >10%, mean " << s.mean_period_s * 1e3
              << " ms, max " << s.max_period_s * 1e3 << " ms\n";
  }
}

Server::Server(ServerOptions opts, std::shared_ptr<const SessionResources> resources)
    : opts_(std::move(opts)), resources_(std::move(resources)) {
  if (!resources_) throw ConfigError("server needs session resources");
  if (opts_.threads < 1) throw ConfigError("server needs at least one thread");
  impl_ = std::make_unique<Impl>(opts_, resources_);
}

Server::~Server() {
  Stop();
  Wait();
}

void Server::Start() {
  if (!opts_.blinding_log_path.empty()) {
    impl_->blinding_file.open(opts_.blinding_log_path, std::ios::app);
    if (!impl_->blinding_file) {
      throw ConfigError("cannot open blinding log " + opts_.blinding_log_path);
    }
  }
  beast::error_code ec;
  const auto address = asio::ip::make_address(opts_.address, ec);
  if (ec) throw ConfigError("bad listen address " + opts_.address);
  const tcp::endpoint endpoint(address, opts_.port);
  auto& acc = impl_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw ConfigError("cannot listen on " + opts_.address + ":" +
                            std::to_string(opts_.port) + ": " + ec.message());
  port_ = acc.local_endpoint().port();
  impl_->DoAccept();
  for (int i = 0; i < opts_.threads; ++i) {
    threads_.emplace_back([this] { impl_->ioc.run(); });
  }
}

void Server::Wait() {
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

void Server::Stop() {
  if (!impl_) return;
  asio::post(impl_->acceptor.get_executor(), [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
  });
  impl_->ioc.stop();
}

std::vector<BlindingEntry> Server::blinding_log() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->blinding;
}

std::vector<TickStats> Server::tick_stats() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->ticks;
}

}  // namespace sa::server
