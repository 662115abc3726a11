#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vp/runtime.hpp"

namespace vp {

struct Endpoint {
  std::string host;
  int port = 0;
};

/// Stream-socket worker: accepts connections and answers request frames
/// with compressed predictions, one in-flight request per connection.
/// Malformed frames get an error response; the connection stays open.
class WorkerServer {
 public:
  /// Binds and starts serving immediately. port 0 picks an ephemeral port
  /// (see port()).
  WorkerServer(WorkerAssignment assignment, int k, const std::string& host, int port);
  ~WorkerServer();

  WorkerServer(const WorkerServer&) = delete;
  WorkerServer& operator=(const WorkerServer&) = delete;

  int port() const { return port_; }
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  WorkerAssignment assignment_;
  int k_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex mutex_;
  std::vector<int> connection_fds_;
  std::vector<std::thread> connection_threads_;
};

/// Socket master: connects to the workers once, then per request
/// multicasts the input, polls for responses until the deadline window
/// elapses, and aggregates whatever arrived (plus its own prediction when
/// configured and finished in time). Never blocks on a dead worker.
class TcpMaster {
 public:
  /// session.workers must be endpoint-aligned; their predictors are unused
  /// (the remote side owns them).
  TcpMaster(SessionConfig session, std::vector<Endpoint> workers,
            double connect_timeout_ms = 1000.0);
  ~TcpMaster();

  TcpMaster(const TcpMaster&) = delete;
  TcpMaster& operator=(const TcpMaster&) = delete;

  MasterReport run(const InferenceRequest& request);

 private:
  SessionConfig session_;
  std::vector<int> fds_;
  std::vector<std::vector<std::uint8_t>> rx_buffers_;
};

}  // namespace vp
