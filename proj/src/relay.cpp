#include "avatar/relay.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <deque>

namespace avatar {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0 || !res) {
    throw RelayError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof(addr));
  ::freeaddrinfo(res);
  return addr;
}

bool send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw RelayError("expected host:port, got '" + text + "'");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  unsigned port = 0;
  const char* b = text.data() + colon + 1;
  const char* e = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(b, e, port);
  if (ec != std::errc() || ptr != e || port > 65535) throw RelayError("bad port in '" + text + "'");
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

FrameSource session_source(Session session) {
  auto frames = std::make_shared<std::vector<SessionFrame>>(std::move(session.frames));
  auto index = std::make_shared<std::size_t>(0);
  return [frames, index]() -> std::optional<SessionFrame> {
    if (*index >= frames->size()) return std::nullopt;
    return (*frames)[(*index)++];
  };
}

// ---------------------------------------------------------------------------
// Server

struct RelayServer::Subscriber {
  int fd = -1;
  std::mutex m;
  std::condition_variable cv;
  std::deque<std::string> queue;
  bool closing = false;  // drain, then close cleanly
  bool dead = false;     // close now
  bool closed = false;
  std::thread writer;
};

RelayServer::RelayServer(RelayConfig config, FrameSource source) : config_(std::move(config)), source_(std::move(source)) {
  if (!(config_.rate_hz > 0.0)) throw RelayError("relay rate must be positive");
  if (config_.queue_frames == 0) throw RelayError("relay queue must hold at least one frame");
  const sockaddr_in addr = resolve(parse_endpoint(config_.bind));

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw RelayError(errno_text("socket"));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string msg = errno_text(("cannot listen on " + config_.bind).c_str());
    ::close(listen_fd_);
    throw RelayError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

RelayServer::~RelayServer() {
  if (started_ && !waited_) stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void RelayServer::start() {
  if (started_) return;
  started_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  producer_ = std::thread([this] { produce_loop(); });
}

void RelayServer::accept_loop() {
  while (!stopping_ && !finished_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, 50);
    if (rc <= 0 || !(p.revents & POLLIN)) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    if (config_.send_buffer_bytes > 0) {
      ::setsockopt(fd, SOL_SOCKET, SO_SNDBUF, &config_.send_buffer_bytes, sizeof(config_.send_buffer_bytes));
    }

    auto sub = std::make_shared<Subscriber>();
    sub->fd = fd;
    sub->queue.push_back(format_header(config_.header_rate_hz) + "\n");
    sub->writer = std::thread([this, sub] {
      bool clean = true;
      for (;;) {
        std::string line;
        {
          std::unique_lock lock(sub->m);
          sub->cv.wait(lock, [&] { return sub->dead || sub->closing || !sub->queue.empty(); });
          if (sub->dead) {
            clean = false;
            break;
          }
          if (sub->queue.empty()) break;
          line = std::move(sub->queue.front());
          sub->queue.pop_front();
        }
        if (!send_all(sub->fd, line)) {
          std::lock_guard lock(sub->m);
          if (!sub->dead) {
            sub->dead = true;
            std::lock_guard stats_lock(mutex_);
            ++stats_.dropped;
          }
          clean = false;
          break;
        }
      }
      std::lock_guard lock(sub->m);
      if (clean) ::shutdown(sub->fd, SHUT_WR);
      ::close(sub->fd);
      sub->closed = true;
    });

    std::lock_guard lock(mutex_);
    subscribers_.push_back(sub);
    ++stats_.subscribers;
    joined_.notify_all();
  }
}

void RelayServer::broadcast(const std::string& line) {
  std::vector<std::shared_ptr<Subscriber>> subs;
  {
    std::lock_guard lock(mutex_);
    subs = subscribers_;
  }
  for (auto& sub : subs) {
    std::lock_guard lock(sub->m);
    if (sub->dead || sub->closed) continue;
    if (sub->queue.size() >= config_.queue_frames) {
      sub->dead = true;
      sub->queue.clear();
      ::shutdown(sub->fd, SHUT_RDWR);  // unblocks a writer stuck in send
      std::lock_guard stats_lock(mutex_);
      ++stats_.dropped;
    } else {
      sub->queue.push_back(line);
    }
    sub->cv.notify_one();
  }
}

void RelayServer::produce_loop() {
  {
    std::unique_lock lock(mutex_);
    joined_.wait(lock, [&] { return stopping_ || subscribers_.size() >= config_.wait_for_subscribers; });
  }
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration<double>(1.0 / config_.rate_hz);
  const auto t0 = clock::now();
  for (std::size_t i = 0; !stopping_; ++i) {
    const std::optional<SessionFrame> frame = source_();
    if (!frame) break;
    const std::string line = format_frame(*frame) + "\n";
    std::this_thread::sleep_until(t0 + std::chrono::duration_cast<clock::duration>(period * static_cast<double>(i)));
    broadcast(line);
    std::lock_guard lock(mutex_);
    ++stats_.frames;
  }
  finish_all();
  finished_ = true;
}

void RelayServer::finish_all() {
  std::lock_guard lock(mutex_);
  for (auto& sub : subscribers_) {
    std::lock_guard sub_lock(sub->m);
    sub->closing = true;
    sub->cv.notify_one();
  }
}

void RelayServer::wait() {
  if (!started_ || waited_) return;
  if (producer_.joinable()) producer_.join();
  if (acceptor_.joinable()) acceptor_.join();
  // Connections accepted after the last tick were never told to close.
  finish_all();
  std::vector<std::shared_ptr<Subscriber>> subs;
  {
    std::lock_guard lock(mutex_);
    subs = subscribers_;
  }
  for (auto& sub : subs)
    if (sub->writer.joinable()) sub->writer.join();
  waited_ = true;
}

void RelayServer::stop() {
  stopping_ = true;
  {
    std::lock_guard lock(mutex_);
    joined_.notify_all();
    for (auto& sub : subscribers_) {
      std::lock_guard sub_lock(sub->m);
      if (!sub->closed) ::shutdown(sub->fd, SHUT_RDWR);
      sub->dead = true;
      sub->cv.notify_one();
    }
  }
  wait();
}

RelayStats RelayServer::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

// ---------------------------------------------------------------------------
// Decoder

void StreamDecoder::feed(std::string_view bytes) { buffer_.append(bytes); }

bool StreamDecoder::read_header() {
  if (rate_) return true;
  const auto nl = buffer_.find('\n');
  if (nl == std::string::npos) return false;
  std::string line = buffer_.substr(0, nl);
  buffer_.erase(0, nl + 1);
  ++line_no_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  rate_ = parse_header(line, line_no_);
  return true;
}

std::optional<StreamItem> StreamDecoder::next() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl == std::string::npos) return std::nullopt;
    std::string line = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!rate_) {
      rate_ = parse_header(line, line_no_);
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    StreamItem item;
    item.line = line_no_;
    try {
      item.frame = parse_frame(line, line_no_);
    } catch (const ParseError& e) {
      item.kind = StreamItem::Kind::BadLine;
      item.error = e.what();
    }
    return item;
  }
}

// ---------------------------------------------------------------------------
// Subscriber

RelaySubscriber::RelaySubscriber(const std::string& address, SubscribeOptions options) : options_(options) {
  if (options_.filter_beta && !(*options_.filter_beta > 0.0 && *options_.filter_beta <= 1.0)) {
    throw std::invalid_argument("filter beta must be in (0, 1]");
  }
  sockaddr_in addr{};
  try {
    addr = resolve(parse_endpoint(address));
  } catch (const RelayError& e) {
    throw TransportError(e.what());
  }
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(errno_text("socket"));
  if (options_.receive_buffer_bytes > 0) {
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &options_.receive_buffer_bytes, sizeof(options_.receive_buffer_bytes));
  }
  if (::connect(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
    const std::string msg = errno_text(("cannot connect to " + address).c_str());
    ::close(fd_);
    fd_ = -1;
    throw TransportError(msg);
  }
  try {
    while (!decoder_.read_header()) {
      if (!fill()) throw TransportError("connection closed before the header");
    }
  } catch (...) {
    ::close(fd_);
    fd_ = -1;
    throw;
  }
  rate_ = *decoder_.rate();
}

RelaySubscriber::~RelaySubscriber() {
  if (fd_ >= 0) ::close(fd_);
}

bool RelaySubscriber::fill() {
  char buf[65536];
  for (;;) {
    const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
    if (n > 0) {
      decoder_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      return true;
    }
    if (n == 0) return false;
    if (errno == EINTR) continue;
    throw TransportError(errno_text("recv"));
  }
}

std::optional<StreamItem> RelaySubscriber::next() {
  for (;;) {
    std::optional<StreamItem> item = decoder_.next();
    if (item) {
      if (item->kind == StreamItem::Kind::Frame && options_.filter_beta) {
        filter_ = filter_ ? ema_filter(*filter_, item->frame.base) : FilterState{item->frame.base, *options_.filter_beta};
        item->frame.base = filter_->smoothed;
      }
      return item;
    }
    if (!fill()) {
      if (!decoder_.at_line_boundary()) throw TransportError("connection closed in the middle of a line");
      return std::nullopt;
    }
  }
}

}  // namespace avatar
