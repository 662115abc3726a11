#include "vp/tcp.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <future>

#include "vp/errors.hpp"

namespace vp {

namespace {

constexpr std::uint32_t kMaxPayloadBytes = 1u << 24;

bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
  std::size_t sent = 0;
  while (sent < len) {
    const ssize_t n = ::send(fd, data + sent, len - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && (errno == EINTR)) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

bool recv_exact(int fd, std::uint8_t* data, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(fd, data + got, len - got, 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

sockaddr_in make_addr(const std::string& host, int port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw InvalidArgumentError("not an IPv4 address: " + host);
  }
  return addr;
}

int connect_with_timeout(const std::string& host, int port, double timeout_ms) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error("socket() failed");
  const int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);

  sockaddr_in addr = make_addr(host, port);
  int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  if (rc != 0 && errno == EINPROGRESS) {
    pollfd pfd{fd, POLLOUT, 0};
    rc = ::poll(&pfd, 1, static_cast<int>(timeout_ms));
    int err = 0;
    socklen_t len = sizeof(err);
    if (rc == 1) ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
    rc = (rc == 1 && err == 0) ? 0 : -1;
  }
  if (rc != 0) {
    ::close(fd);
    throw Error("cannot connect to " + host + ":" + std::to_string(port));
  }
  ::fcntl(fd, F_SETFL, flags);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

}  // namespace

WorkerServer::WorkerServer(WorkerAssignment assignment, int k, const std::string& host, int port)
    : assignment_(std::move(assignment)), k_(k) {
  if (!assignment_.predictor) throw InvalidArgumentError("worker needs a predictor");
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(host, port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listen_fd_);
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  if (::listen(listen_fd_, 16) != 0) {
    ::close(listen_fd_);
    throw Error("listen() failed");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

WorkerServer::~WorkerServer() { stop(); }

void WorkerServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (int fd : connection_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : connection_threads_) {
    if (t.joinable()) t.join();
  }
  std::lock_guard<std::mutex> lock(mutex_);
  for (int fd : connection_fds_) ::close(fd);
  connection_fds_.clear();
}

void WorkerServer::accept_loop() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_) break;
      if (errno == EINTR) continue;
      break;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    connection_fds_.push_back(fd);
    connection_threads_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void WorkerServer::serve_connection(int fd) {
  std::vector<std::uint8_t> header(kFrameHeaderBytes);
  while (!stopping_) {
    if (!recv_exact(fd, header.data(), header.size())) break;

    std::uint64_t request_id = 0;
    Frame reply;
    try {
      const FrameHeader parsed = decode_frame_header(header);
      request_id = parsed.request_id;
      if (parsed.payload_len > kMaxPayloadBytes) {
        throw CorruptPayloadError("declared payload too large");
      }
      std::vector<std::uint8_t> payload(parsed.payload_len);
      if (!recv_exact(fd, payload.data(), payload.size())) break;
      if (parsed.type != MsgType::Request) {
        throw ProtocolError("worker expects request frames");
      }
      reply.type = MsgType::Response;
      reply.request_id = request_id;
      reply.payload = worker_response_payload(*assignment_.predictor, k_, payload);
    } catch (const Error& e) {
      // Protocol error response; the connection stays usable.
      reply.type = MsgType::Error;
      reply.request_id = request_id;
      const std::string what = e.what();
      reply.payload.assign(what.begin(), what.end());
    }
    const std::vector<std::uint8_t> bytes = encode_frame(reply);
    if (!send_all(fd, bytes.data(), bytes.size())) break;
  }
}

TcpMaster::TcpMaster(SessionConfig session, std::vector<Endpoint> workers,
                     double connect_timeout_ms)
    : session_(std::move(session)) {
  if (session_.workers.size() != workers.size()) {
    throw InvalidArgumentError("session workers and endpoints differ in count");
  }
  fds_.reserve(workers.size());
  for (const auto& ep : workers) {
    fds_.push_back(connect_with_timeout(ep.host, ep.port, connect_timeout_ms));
  }
  rx_buffers_.resize(workers.size());
}

TcpMaster::~TcpMaster() {
  for (int fd : fds_) {
    if (fd >= 0) ::close(fd);
  }
}

MasterReport TcpMaster::run(const InferenceRequest& request) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  MasterReport report;
  report.request_id = request.request_id;
  report.window_ms = request.deadline_window_ms;
  report.workers.resize(fds_.size());

  const std::vector<std::uint8_t> request_frame =
      encode_frame({MsgType::Request, request.request_id, request.input_blob});
  std::vector<bool> open(fds_.size());
  for (std::size_t i = 0; i < fds_.size(); ++i) {
    report.workers[i].worker_index = static_cast<int>(i);
    report.workers[i].variant_id = session_.workers[i].variant.index;
    open[i] = fds_[i] >= 0 && send_all(fds_[i], request_frame.data(), request_frame.size());
    if (!open[i] && fds_[i] >= 0) {
      ::close(fds_[i]);
      fds_[i] = -1;
    }
  }

  // The master's own variant computes concurrently with the window.
  std::future<std::vector<std::uint8_t>> local;
  if (session_.master_variant && session_.master_variant->predictor) {
    local = std::async(std::launch::async, [this, &request] {
      return worker_response_payload(*session_.master_variant->predictor, session_.k,
                                     request.input_blob);
    });
  }

  std::vector<CompressedPrediction> arrived;
  std::vector<bool> answered(fds_.size(), false);
  std::size_t outstanding = 0;
  for (std::size_t i = 0; i < open.size(); ++i) outstanding += open[i] ? 1 : 0;

  std::vector<std::uint8_t> chunk(64 * 1024);
  while (outstanding > 0) {
    const double remaining = request.deadline_window_ms - elapsed_ms();
    if (remaining <= 0) break;

    std::vector<pollfd> pfds;
    std::vector<std::size_t> slot_of;
    for (std::size_t i = 0; i < fds_.size(); ++i) {
      if (open[i] && !answered[i]) {
        pfds.push_back({fds_[i], POLLIN, 0});
        slot_of.push_back(i);
      }
    }
    const int rc = ::poll(pfds.data(), pfds.size(), static_cast<int>(remaining) + 1);
    if (rc <= 0) continue;  // timeout or EINTR; loop re-checks the window

    for (std::size_t p = 0; p < pfds.size(); ++p) {
      if (!(pfds[p].revents & (POLLIN | POLLERR | POLLHUP))) continue;
      const std::size_t i = slot_of[p];
      const ssize_t n = ::recv(fds_[i], chunk.data(), chunk.size(), 0);
      if (n <= 0) {
        open[i] = false;
        --outstanding;
        continue;
      }
      auto& buf = rx_buffers_[i];
      buf.insert(buf.end(), chunk.begin(), chunk.begin() + n);

      // Drain complete frames; stale request ids are discarded.
      while (buf.size() >= kFrameHeaderBytes) {
        FrameHeader header;
        try {
          header = decode_frame_header(buf);
        } catch (const Error&) {
          open[i] = false;  // framing lost; give up on this worker
          --outstanding;
          buf.clear();
          break;
        }
        if (header.payload_len > kMaxPayloadBytes) {
          open[i] = false;
          --outstanding;
          buf.clear();
          break;
        }
        const std::size_t total = kFrameHeaderBytes + header.payload_len;
        if (buf.size() < total) break;
        std::vector<std::uint8_t> payload(buf.begin() + kFrameHeaderBytes, buf.begin() + total);
        buf.erase(buf.begin(), buf.begin() + total);
        if (header.request_id != request.request_id) continue;
        if (answered[i]) continue;

        const double now = elapsed_ms();
        if (header.type == MsgType::Response) {
          answered[i] = true;
          --outstanding;
          try {
            CompressedPrediction pred = decode(payload);
            report.workers[i].status = SlotStatus::Responded;
            report.workers[i].arrival_ms = now;
            arrived.push_back(std::move(pred));
          } catch (const Error&) {
            report.workers[i].status = SlotStatus::NoResponse;
          }
        } else if (header.type == MsgType::Error) {
          // The worker answered but cannot contribute.
          answered[i] = true;
          --outstanding;
        }
      }
    }
  }

  if (local.valid()) {
    const auto deadline =
        t0 + std::chrono::duration_cast<Clock::duration>(
                 std::chrono::duration<double, std::milli>(request.deadline_window_ms));
    if (local.wait_until(deadline) == std::future_status::ready) {
      try {
        arrived.push_back(decode(local.get()));
        report.master_contributed = true;
      } catch (const Error&) {
      }
    }
    // An unfinished local compute is abandoned to honor the deadline; the
    // async result is dropped when the future dies.
  }

  report.result = aggregate_arrivals(session_, arrived);
  report.completed_at_ms = elapsed_ms();
  return report;
}

}  // namespace vp
