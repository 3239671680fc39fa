#pragma once

// Pose relay over TCP. The server sends the session header line to each new
// subscriber and then one frame line per tick, using the session file
// grammar. Each subscriber has its own writer thread and a bounded queue; a
// subscriber whose queue overflows is disconnected without slowing the
// others. When the source runs dry every subscriber gets a clean close after
// its queue drains.

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "avatar/session.hpp"

namespace avatar {

class RelayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Connection lost or stream cut mid-line.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// "host:port". Throws RelayError on a malformed address.
Endpoint parse_endpoint(const std::string& text);

/// Pulls the next frame; empty when the source is exhausted.
using FrameSource = std::function<std::optional<SessionFrame>()>;

FrameSource session_source(Session session);

struct RelayConfig {
  std::string bind = "127.0.0.1:0";  // port 0 picks a free port
  double rate_hz = 100.0;
  double header_rate_hz = 100.0;     // advertised in the header line
  std::size_t queue_frames = 256;
  std::size_t wait_for_subscribers = 0;  // hold the first tick until this many have connected
  int send_buffer_bytes = 0;             // SO_SNDBUF per subscriber, 0 keeps the system default
};

struct RelayStats {
  std::size_t frames = 0;       // ticks produced
  std::size_t subscribers = 0;  // accepted connections
  std::size_t dropped = 0;      // disconnected for overflow or write failure
};

class RelayServer {
 public:
  /// Binds and listens immediately; throws RelayError when that fails.
  RelayServer(RelayConfig config, FrameSource source);
  ~RelayServer();

  RelayServer(const RelayServer&) = delete;
  RelayServer& operator=(const RelayServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Starts accepting and ticking in background threads.
  void start();
  /// Blocks until the source is exhausted and every subscriber is closed.
  void wait();
  /// Stops early; pending subscribers are closed.
  void stop();

  RelayStats stats() const;

 private:
  struct Subscriber;

  void accept_loop();
  void produce_loop();
  void broadcast(const std::string& line);
  void finish_all();

  RelayConfig config_;
  FrameSource source_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<bool> finished_{false};

  mutable std::mutex mutex_;
  std::condition_variable joined_;
  std::vector<std::shared_ptr<Subscriber>> subscribers_;
  RelayStats stats_;

  std::thread acceptor_;
  std::thread producer_;
  bool started_ = false;
  bool waited_ = false;
};

/// Incremental line decoder used by the subscriber. Feed raw bytes, pull
/// items. The first complete line must be the header.
struct StreamItem {
  enum class Kind { Frame, BadLine };
  Kind kind = Kind::Frame;
  SessionFrame frame;
  std::size_t line = 0;
  std::string error;  // BadLine only
};

class StreamDecoder {
 public:
  void feed(std::string_view bytes);
  /// Next decoded item, if a complete line is buffered. A bad header throws
  /// ParseError since nothing after it can be trusted.
  std::optional<StreamItem> next();
  /// Consumes the header line if it is complete; true once the header is known.
  bool read_header();
  /// True when no partial line is pending.
  bool at_line_boundary() const { return buffer_.empty(); }
  std::optional<double> rate() const { return rate_; }

 private:
  std::string buffer_;
  std::size_t line_no_ = 0;
  std::optional<double> rate_;
};

struct SubscribeOptions {
  std::optional<double> filter_beta;  // smooth base poses when set
  int receive_buffer_bytes = 0;       // SO_RCVBUF, 0 keeps the system default
};

class RelaySubscriber {
 public:
  /// Connects and reads the header. Throws TransportError when unreachable.
  RelaySubscriber(const std::string& address, SubscribeOptions options = {});
  ~RelaySubscriber();

  RelaySubscriber(const RelaySubscriber&) = delete;
  RelaySubscriber& operator=(const RelaySubscriber&) = delete;

  double rate() const { return rate_; }

  /// Next frame or bad-line report; empty on a clean end of stream. Throws
  /// TransportError when the connection breaks.
  std::optional<StreamItem> next();

 private:
  bool fill();

  int fd_ = -1;
  SubscribeOptions options_;
  StreamDecoder decoder_;
  double rate_ = 0.0;
  std::optional<FilterState> filter_;
};

}  // namespace avatar
