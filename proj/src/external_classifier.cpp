#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <nlohmann/json.hpp>

#include "patchcert/classifier.hpp"

namespace patchcert {
namespace {

using nlohmann::json;
using Kind = ClassifierError::Kind;

constexpr const char* kProtocol = "patchcert/1";

class ExternalClassifier final : public Classifier {
 public:
  ExternalClassifier(std::string command, Label label_count, ExternalOptions options)
      : command_(std::move(command)), label_count_(label_count), options_(options) {
    spawn();
    try {
      handshake();
    } catch (...) {
      shutdown();
      throw;
    }
  }

  ~ExternalClassifier() override { shutdown(); }

  ExternalClassifier(const ExternalClassifier&) = delete;
  ExternalClassifier& operator=(const ExternalClassifier&) = delete;

  Label classify(const Sample& x) const override {
    if (options_.expected_frame &&
        (options_.expected_frame->first != x.width() || options_.expected_frame->second != x.height())) {
      throw ClassifierError(Kind::dimension, "external classifier expects " +
                                                 std::to_string(options_.expected_frame->first) + "x" +
                                                 std::to_string(options_.expected_frame->second) +
                                                 " samples, got " + std::to_string(x.width()) + "x" +
                                                 std::to_string(x.height()));
    }
    std::lock_guard lock(mutex_);
    if (broken_) throw ClassifierError(Kind::peer_exited, "external classifier is no longer usable: " + command_);

    const std::uint64_t id = next_id_++;
    json request = {{"id", id}, {"w", x.width()}, {"h", x.height()}, {"labels", label_count_}};
    request["pixels"] = x.to_vector();
    try {
      send_line(request.dump());
      const std::string line = receive_line();
      json response;
      try {
        response = json::parse(line);
      } catch (const json::exception&) {
        throw ClassifierError(Kind::malformed_response, "unparseable response line: " + line);
      }
      if (!response.is_object() || !response.contains("id") || !response["id"].is_number_unsigned() ||
          !response.contains("label") || !response["label"].is_number_integer() || response.size() != 2) {
        throw ClassifierError(Kind::malformed_response, "response is not {\"id\", \"label\"}: " + line);
      }
      if (response["id"].get<std::uint64_t>() != id) {
        throw ClassifierError(Kind::id_mismatch, "response id " + response["id"].dump() +
                                                     " does not echo request id " + std::to_string(id));
      }
      const auto label = response["label"].get<long long>();
      if (label < 0 || label >= static_cast<long long>(label_count_)) {
        throw ClassifierError(Kind::label_range, "peer returned label " + std::to_string(label));
      }
      return static_cast<Label>(label);
    } catch (const ClassifierError&) {
      broken_ = true;
      throw;
    }
  }

  Label label_count() const override { return label_count_; }
  std::string kind() const override { return "extern:" + command_; }

 private:
  void spawn() {
    static const bool ignore_sigpipe = [] {
      ::signal(SIGPIPE, SIG_IGN);
      return true;
    }();
    (void)ignore_sigpipe;

    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw ClassifierError(Kind::spawn, "pipe: " + std::string(std::strerror(errno)));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ClassifierError(Kind::spawn, "pipe: " + std::string(std::strerror(errno)));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw ClassifierError(Kind::spawn, "fork: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
      // Own process group, so shutdown() also reaches anything the shell spawned.
      ::setpgid(0, 0);
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(to_child[0]);
    ::close(from_child[1]);
    pid_ = pid;
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  void handshake() {
    std::string line;
    try {
      send_line(json({{"id", 0}, {"hello", kProtocol}}).dump());
      line = receive_line();
    } catch (const ClassifierError& e) {
      if (e.kind() == Kind::peer_exited) {
        throw ClassifierError(Kind::spawn, "external classifier exited during handshake: " + command_);
      }
      throw;
    }
    json reply;
    try {
      reply = json::parse(line);
    } catch (const json::exception&) {
      throw ClassifierError(Kind::handshake, "unparseable handshake reply: " + line);
    }
    if (reply != json({{"id", 0}, {"ack", kProtocol}})) {
      throw ClassifierError(Kind::handshake, "peer did not acknowledge " + std::string(kProtocol) + ": " + line);
    }
  }

  void send_line(const std::string& text) const {
    std::string data = text + "\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::write(write_fd_, data.data() + sent, data.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ClassifierError(Kind::peer_exited, "write to external classifier failed: " +
                                                     std::string(std::strerror(errno)));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string receive_line() const {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + options_.timeout;
    while (true) {
      if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (remaining <= 0) {
        throw ClassifierError(Kind::timeout, "external classifier did not answer within " +
                                                 std::to_string(options_.timeout.count()) + " ms");
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ClassifierError(Kind::peer_exited, "poll failed: " + std::string(std::strerror(errno)));
      }
      if (ready == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ClassifierError(Kind::peer_exited, "read failed: " + std::string(std::strerror(errno)));
      }
      if (n == 0) throw ClassifierError(Kind::peer_exited, "external classifier closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void shutdown() noexcept {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    write_fd_ = read_fd_ = -1;
    if (pid_ <= 0) return;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
        ::kill(-pid_, SIGKILL);
        pid_ = -1;
        return;
      }
      ::usleep(10000);
    }
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }

  std::string command_;
  Label label_count_;
  ExternalOptions options_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;

  mutable std::mutex mutex_;
  mutable std::string buffer_;
  mutable std::uint64_t next_id_ = 1;
  mutable bool broken_ = false;
};

}  // namespace

ClassifierHandle make_external_classifier(const std::string& command, Label label_count,
                                          const ExternalOptions& options) {
  if (label_count == 0) throw DomainError("external classifier needs at least one label");
  return std::make_shared<ExternalClassifier>(command, label_count, options);
}

}  // namespace patchcert
