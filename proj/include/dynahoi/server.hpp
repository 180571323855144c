#pragma once

// Evaluation server and client over POSIX stream sockets. One thread per
// connection; each session owns its engine and shares nothing mutable.
//
// Session: start_episode -> (image_and_state -> action_data)* -> metrics.
// Chunks longer than the horizon are rejected; chunks running past the last
// frame are truncated. Any failure sends an error message and closes only
// that connection.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynahoi/episode.hpp"
#include "dynahoi/metrics.hpp"
#include "dynahoi/oracle.hpp"
#include "dynahoi/protocol.hpp"

namespace dynahoi {

using Clock = std::chrono::steady_clock;

/// A bidirectional message pipe carrying one payload per frame.
class Connection {
 public:
  virtual ~Connection() = default;
  virtual void send(std::string_view payload) = 0;
  /// Next payload, or nullopt once `deadline` passes. Throws Error("transport")
  /// on a closed peer and Error("malformed_frame") on a bad length prefix.
  virtual std::optional<std::string> receive(Clock::time_point deadline) = 0;
};

class SocketConnection final : public Connection {
 public:
  explicit SocketConnection(int fd) : fd_(fd) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  SocketConnection(const SocketConnection&) = delete;
  SocketConnection& operator=(const SocketConnection&) = delete;
  ~SocketConnection() override { close(); }

  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  int fd() const { return fd_; }

  void send(std::string_view payload) override { write_all(frame_payload(payload)); }

  /// Writes raw bytes, bypassing framing.
  void write_all(std::string_view bytes) {
    std::size_t off = 0;
    while (off < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw Error("transport", std::string("send failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> receive(Clock::time_point deadline) override {
    unsigned char head[4];
    if (!read_exact(reinterpret_cast<char*>(head), 4, deadline)) return std::nullopt;
    const std::uint32_t n = read_frame_length(head);
    if (n > kMaxFrameBytes) throw Error("malformed_frame", "declared length exceeds the frame size limit");
    std::string payload(n, '\0');
    if (!read_exact(payload.data(), n, deadline)) return std::nullopt;
    return payload;
  }

 private:
  bool read_exact(char* dst, std::size_t n, Clock::time_point deadline) {
    std::size_t off = 0;
    while (off < n) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) return false;
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(left, 1 << 30)));
      if (r < 0 && errno == EINTR) continue;
      if (r < 0) throw Error("transport", std::string("poll failed: ") + std::strerror(errno));
      if (r == 0) return false;
      const ssize_t got = ::recv(fd_, dst + off, n - off, 0);
      if (got < 0 && errno == EINTR) continue;
      if (got == 0) throw Error("transport", "peer closed the connection");
      if (got < 0) throw Error("transport", std::string("recv failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(got);
    }
    return true;
  }

  int fd_ = -1;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// "host:port"; a bare port binds loopback.
inline Endpoint parse_endpoint(std::string_view text) {
  Endpoint e;
  std::string_view port = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    e.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  }
  if (e.host.empty()) e.host = "127.0.0.1";
  int p = -1;
  try {
    std::size_t used = 0;
    p = std::stoi(std::string(port), &used);
    if (used != port.size()) p = -1;
  } catch (const std::exception&) {
    p = -1;
  }
  if (p < 0 || p > 65535) throw Error("bad_address", "cannot parse address \"" + std::string(text) + "\"");
  e.port = static_cast<std::uint16_t>(p);
  return e;
}

inline sockaddr_in resolve_ipv4(const Endpoint& e) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(e.port);
  if (::inet_pton(AF_INET, e.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(e.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error("bad_address", "cannot resolve host \"" + e.host + "\"");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

inline std::unique_ptr<SocketConnection> connect_to(const Endpoint& e) {
  const sockaddr_in addr = resolve_ipv4(e);
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error("transport", std::string("socket failed: ") + std::strerror(errno));
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(fd);
    throw Error("transport", "connect to " + e.host + ":" + std::to_string(e.port) + " failed: " + std::strerror(err));
  }
  return std::make_unique<SocketConnection>(fd);
}

// ---------------------------------------------------------------------------
// Sessions

using EpisodeFactory = std::function<EpisodeConfig(const StartEpisode&)>;

/// Builds the episode for (task_type, episode_id) from a catalog and a corpus
/// seed; the requested length becomes the frame count.
struct CatalogEpisodeFactory {
  MotionCatalog catalog = default_catalog();
  std::uint64_t seed = 0;
  EpisodeOptions options;

  EpisodeConfig operator()(const StartEpisode& s) const {
    EpisodeOptions opt = options;
    opt.frames = s.length;
    return make_episode(catalog, s.task_type, s.episode_id, derive_seed(seed, "episode", s.episode_id), opt);
  }
};

struct SessionOptions {
  /// Longest wait for any single client message.
  std::chrono::milliseconds deadline{30'000};
};

struct SessionResult {
  std::optional<StartEpisode> start;
  std::optional<EpisodeRecord> record;
  std::optional<MetricsReport> report;
  std::optional<WireError> error;
  int executed_frames = 0;
  int chunks = 0;
};

namespace detail {

inline void send_error(Connection& c, SessionResult& r, std::string code, std::string detail) {
  r.error = WireError{code, detail};
  try {
    c.send(encode(ErrorMessage{std::move(code), std::move(detail)}));
  } catch (const std::exception&) {
    // The peer is gone; nothing else to report to it.
  }
}

}  // namespace detail

/// Runs one episode over `conn`. Never throws; failures land in the result.
inline SessionResult run_session(Connection& conn, const EpisodeFactory& factory, const SessionOptions& opt = {}) {
  SessionResult r;
  const auto next = [&]() -> std::optional<WireMessage> {
    const auto payload = conn.receive(Clock::now() + opt.deadline);
    if (!payload) {
      detail::send_error(conn, r, "deadline_exceeded",
                         "no client message within " + std::to_string(opt.deadline.count()) + " ms");
      return std::nullopt;
    }
    Decoded d = decode(*payload);
    if (!d.ok()) {
      detail::send_error(conn, r, d.error.code, d.error.detail);
      return std::nullopt;
    }
    return std::move(d.message);
  };

  try {
    const auto first = next();
    if (!first) return r;
    if (!std::holds_alternative<StartEpisode>(*first)) {
      detail::send_error(conn, r, "out_of_order",
                         "expected start_episode, got " + std::string(message_type(*first)));
      return r;
    }
    const StartEpisode start = std::get<StartEpisode>(*first);
    r.start = start;
    EpisodeConfig cfg;
    try {
      cfg = factory(start);
    } catch (const Error& e) {
      detail::send_error(conn, r, e.code(), e.what());
      return r;
    }
    Engine engine(std::move(cfg));
    while (!engine.done()) {
      conn.send(encode(make_image_and_state(engine.observation())));
      const auto reply = next();
      if (!reply) return r;
      if (!std::holds_alternative<ActionData>(*reply)) {
        detail::send_error(conn, r, "out_of_order", "expected action_data, got " + std::string(message_type(*reply)));
        return r;
      }
      const ActionData& chunk = std::get<ActionData>(*reply);
      std::vector<Action> actions;
      if (chunk.program) {
        const SkillParse parsed = parse_skill_program(*chunk.program, start.horizon);
        if (!parsed.ok()) {
          detail::send_error(conn, r, "skill_program", parsed.diagnostic.str());
          return r;
        }
        actions = expand_skill_program(*parsed.program, engine.hand(), engine.config().dt);
      } else {
        if (static_cast<int>(chunk.actions.size()) > start.horizon) {
          detail::send_error(conn, r, "chunk_too_long",
                             std::to_string(chunk.actions.size()) + " rows exceed horizon " +
                                 std::to_string(start.horizon));
          return r;
        }
        for (const auto& row : chunk.actions) actions.push_back(Action::from_vector(row));
      }
      ++r.chunks;
      for (const Action& a : actions) {
        if (engine.done()) break;  // truncate at the episode boundary
        engine.step(a);
        ++r.executed_frames;
      }
    }
    r.record = engine.finish();
    r.report = evaluate(*r.record);
    conn.send(encode(MetricsMessage{*r.report}));
  } catch (const Error& e) {
    detail::send_error(conn, r, e.code(), e.what());
  } catch (const std::exception& e) {
    detail::send_error(conn, r, "internal", e.what());
  }
  return r;
}

class Server {
 public:
  using SessionCallback = std::function<void(const SessionResult&)>;

  Server(EpisodeFactory factory, SessionOptions options = {}) : factory_(std::move(factory)), options_(options) {}
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() {
    stop();
    wait();
  }

  void on_session(SessionCallback cb) { callback_ = std::move(cb); }

  /// Binds and listens; returns the bound port (useful with port 0).
  std::uint16_t listen(const Endpoint& e) {
    const sockaddr_in addr = resolve_ipv4(e);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error("transport", std::string("socket failed: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
      const int err = errno;
      ::close(listen_fd_);
      listen_fd_ = -1;
      throw Error("transport", "cannot listen on " + e.host + ":" + std::to_string(e.port) + ": " + std::strerror(err));
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    return ntohs(bound.sin_port);
  }

  /// Accept loop; returns after stop() or once `max_sessions` (> 0) have been accepted.
  void serve(int max_sessions = 0) {
    int accepted = 0;
    while (!stopping_ && (max_sessions <= 0 || accepted < max_sessions)) {
      pollfd p{listen_fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, 50);
      if (r <= 0) continue;
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      ++accepted;
      std::lock_guard lock(mu_);
      workers_.emplace_back([this, fd] {
        SocketConnection conn(fd);
        const SessionResult res = run_session(conn, factory_, options_);
        if (callback_) {
          std::lock_guard cb_lock(callback_mu_);
          callback_(res);
        }
      });
    }
  }

  void start(int max_sessions = 0) {
    acceptor_ = std::thread([this, max_sessions] { serve(max_sessions); });
  }

  void stop() { stopping_ = true; }

  /// Joins the acceptor and every session thread.
  void wait() {
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> ws;
    {
      std::lock_guard lock(mu_);
      ws.swap(workers_);
    }
    for (auto& w : ws) w.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
  }

 private:
  EpisodeFactory factory_;
  SessionOptions options_;
  SessionCallback callback_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::mutex callback_mu_;
  std::vector<std::thread> workers_;
};

// ---------------------------------------------------------------------------
// Client side

/// Maps one image_and_state to the chunk sent back.
using ChunkPolicy = std::function<ActionData(const ImageAndState&)>;

/// One-row chunks from a step-wise controller.
inline ChunkPolicy controller_policy(Controller& c) {
  return [&c](const ImageAndState& m) {
    ActionData a;
    a.actions.push_back(c.act(m.observation).as_vector());
    return a;
  };
}

/// Drives one episode; returns the terminal report or throws the server's error code.
inline MetricsReport run_client_episode(Connection& conn, const StartEpisode& start, const ChunkPolicy& policy,
                                        std::chrono::milliseconds timeout = std::chrono::milliseconds{30'000}) {
  conn.send(encode(start));
  for (;;) {
    const auto payload = conn.receive(Clock::now() + timeout);
    if (!payload) throw Error("deadline_exceeded", "server did not answer in time");
    Decoded d = decode(*payload);
    if (!d.ok()) throw Error(d.error.code, d.error.detail);
    if (const auto* m = std::get_if<MetricsMessage>(&*d.message)) return m->report;
    if (const auto* e = std::get_if<ErrorMessage>(&*d.message)) throw Error(e->code, e->detail);
    const auto* obs = std::get_if<ImageAndState>(&*d.message);
    if (!obs) throw Error("out_of_order", "unexpected " + std::string(message_type(*d.message)) + " from server");
    conn.send(encode(policy(*obs)));
  }
}

/// The scripted oracle as a wire client. It rebuilds the episode with the
/// same factory as the server (privileged access to the motion model) and
/// otherwise sees only the streamed observations.
inline MetricsReport run_oracle_client(Connection& conn, const StartEpisode& start, const EpisodeFactory& factory) {
  const EpisodeConfig cfg = factory(start);
  OracleController oracle(cfg);
  return run_client_episode(conn, start, controller_policy(oracle));
}

}  // namespace dynahoi
