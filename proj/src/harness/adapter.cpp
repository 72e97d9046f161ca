#include "srb/harness/adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "srb/error.hpp"
#include "srb/hash.hpp"
#include "srb/log.hpp"
#include "srb/parallel.hpp"

extern char** environ;

namespace srb::harness {

namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
  });
}

std::uint64_t parse_hex(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = std::stoull(s, &used, 16);
  if (used != s.size()) throw std::invalid_argument("bad hex");
  return v;
}

// Owns the child process and the parent ends of its pipes. Anything still
// running when this goes out of scope is killed.
class Child {
 public:
  explicit Child(const std::vector<std::string>& command) {
    ignore_sigpipe();
    std::vector<std::string> args = command;
    if (args.size() == 1) args = {"/bin/sh", "-c", command.front()};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    int in[2], out[2];
    if (pipe2(in, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
    if (pipe2(out, O_CLOEXEC) != 0) {
      ::close(in[0]);
      ::close(in[1]);
      throw Error(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out[1], STDOUT_FILENO);
    // Own process group, so a shell wrapper and whatever it starts die together.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    int rc = posix_spawnp(&pid_, argv[0], &fa, &attr, argv.data(), environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&fa);
    ::close(in[0]);
    ::close(out[1]);
    in_ = in[1];
    out_ = out[0];
    group_ = rc == 0 ? pid_ : 0;
    if (rc != 0) {
      pid_ = 0;
      close_all();
      throw AdapterError("cannot start adapter '" + args.front() + "': " + std::strerror(rc));
    }
    fcntl(in_, F_SETFL, fcntl(in_, F_GETFL) | O_NONBLOCK);
    fcntl(out_, F_SETFL, fcntl(out_, F_GETFL) | O_NONBLOCK);
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  ~Child() {
    close_all();
    if (pid_ > 0) {
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
    if (group_ > 0) ::kill(-group_, SIGKILL);
  }

  int in() const { return in_; }
  int out() const { return out_; }

  void close_in() {
    if (in_ >= 0) ::close(in_);
    in_ = -1;
  }

  // Waits up to `grace` for a clean exit, then kills. Returns the raw status.
  int reap(std::chrono::duration<double> grace) {
    close_all();
    int status = 0;
    const auto deadline = Clock::now() + grace;
    while (pid_ > 0) {
      pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || (r < 0 && errno != EINTR)) {
        pid_ = 0;
        break;
      }
      if (Clock::now() >= deadline) {
        ::kill(-pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = 0;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return status;
  }

 private:
  void close_all() {
    close_in();
    if (out_ >= 0) ::close(out_);
    out_ = -1;
  }

  pid_t pid_ = 0;
  pid_t group_ = 0;  // process group, still signalled after the leader is reaped
  int in_ = -1;
  int out_ = -1;
};

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
  return "unknown status";
}

}  // namespace

std::string adapter_cache_key(const ModelAdapter& adapter) {
  std::uint64_t h = fnv1a64(std::string_view("cmd"));
  for (const auto& part : adapter.command) h = fnv1a64(part, hash_combine(h, part.size()));
  return adapter.id + ":" + to_hex(h);
}

TranscriptCache::TranscriptCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      entries_[{j.at("adapter").get<std::string>(), parse_hex(j.at("audio_hash").get<std::string>())}] =
          j.at("text").get<std::string>();
    } catch (const std::exception&) {
      log_warning(path_ + ":" + std::to_string(lineno) + ": skipping unreadable cache line");
    }
  }
}

std::optional<std::string> TranscriptCache::lookup(const std::string& adapter_key,
                                                   std::uint64_t audio_hash) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find({adapter_key, audio_hash});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranscriptCache::store(const std::string& adapter_key, std::uint64_t audio_hash,
                            const std::string& text) {
  std::lock_guard lock(mutex_);
  entries_[{adapter_key, audio_hash}] = text;
  if (path_.empty()) return;
  auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to cache " + path_);
  out << nlohmann::json{{"adapter", adapter_key}, {"audio_hash", to_hex(audio_hash)}, {"text", text}}.dump()
      << '\n';
  out.flush();
}

std::size_t TranscriptCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void run_adapter(const ModelAdapter& adapter, const std::vector<AdapterRequest>& requests,
                 const ResponseHandler& on_response) {
  if (requests.empty()) return;
  if (adapter.command.empty()) throw ValidationError("adapter '" + adapter.id + "' has no command");

  std::unordered_set<std::string> expected;
  for (const auto& r : requests)
    if (!expected.insert(r.id).second) throw ValidationError("duplicate request id '" + r.id + "'");

  std::unordered_set<std::string> answered;
  auto pending = [&] {
    std::vector<std::string> ids;
    for (const auto& r : requests)
      if (!answered.count(r.id)) ids.push_back(r.id);
    return ids;
  };

  Child child(adapter.command);
  const auto timeout = std::chrono::duration<double>(adapter.timeout_seconds);
  const std::size_t window = std::max<std::size_t>(1, adapter.max_in_flight);

  std::unordered_map<std::string, Clock::time_point> in_flight;
  std::size_t next = 0;
  std::string wbuf, rbuf;
  bool stdout_open = true;

  auto fail = [&](const std::string& why) -> void {
    throw AdapterError("adapter '" + adapter.id + "': " + why, pending());
  };

  while (answered.size() < requests.size()) {
    while (next < requests.size() && in_flight.size() < window) {
      wbuf += nlohmann::json{{"id", requests[next].id}, {"audio", requests[next].audio_path}}.dump();
      wbuf += '\n';
      in_flight[requests[next].id] = Clock::now();
      ++next;
    }
    if (next == requests.size() && wbuf.empty()) child.close_in();
    if (!stdout_open) {
      int status = child.reap(std::chrono::seconds(1));
      fail("exited (" + describe_status(status) + ") with " + std::to_string(requests.size() - answered.size()) +
           " requests unanswered");
    }

    auto oldest = Clock::now();
    for (const auto& [id, t] : in_flight) oldest = std::min(oldest, t);
    const auto deadline = oldest + std::chrono::duration_cast<Clock::duration>(timeout);
    const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();

    pollfd fds[2] = {{child.out(), POLLIN, 0}, {child.in(), POLLOUT, 0}};
    const nfds_t nfds = (!wbuf.empty() && child.in() >= 0) ? 2 : 1;
    int rc = ::poll(fds, nfds, static_cast<int>(std::clamp<long long>(wait_ms, 0, 1000)));
    if (rc < 0 && errno != EINTR) fail(std::string("poll failed: ") + std::strerror(errno));

    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::write(child.in(), wbuf.data(), wbuf.size());
      if (n > 0) {
        wbuf.erase(0, static_cast<std::size_t>(n));
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        wbuf.clear();
        child.close_in();
      }
    }

    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[65536];
      ssize_t n = ::read(child.out(), buf, sizeof buf);
      if (n > 0) {
        rbuf.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        stdout_open = false;
      } else if (errno != EAGAIN && errno != EINTR) {
        stdout_open = false;
      }
    }

    std::size_t nl;
    while ((nl = rbuf.find('\n')) != std::string::npos) {
      std::string line = rbuf.substr(0, nl);
      rbuf.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::string id, text;
      try {
        auto j = nlohmann::json::parse(line);
        id = j.at("id").get<std::string>();
        text = j.at("text").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        fail(std::string("malformed response: ") + e.what());
      }
      if (!expected.count(id)) fail("response for unknown id '" + id + "'");
      if (!answered.insert(id).second) fail("duplicate response for id '" + id + "'");
      in_flight.erase(id);
      on_response(id, text);
    }

    if (answered.size() < requests.size() && !in_flight.empty() && Clock::now() >= deadline)
      fail("timed out after " + std::to_string(adapter.timeout_seconds) + " s waiting for a response");
  }

  child.close_in();
  int status = child.reap(timeout);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    log_warning("adapter '" + adapter.id + "' finished with " + describe_status(status));
}

std::unordered_map<std::string, std::string> transcribe(const ModelAdapter& adapter, const Manifest& manifest,
                                                        TranscriptCache& cache, TranscribeStats* stats) {
  const std::string key = adapter_cache_key(adapter);
  std::vector<std::uint64_t> hashes(manifest.entries.size());
  parallel_for(manifest.entries.size(), 0,
               [&](std::size_t i) { hashes[i] = hash_file(manifest.entries[i].audio_path); });

  std::unordered_map<std::string, std::string> out;
  std::unordered_map<std::string, std::uint64_t> hash_of;
  std::vector<AdapterRequest> requests;
  TranscribeStats local;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& u = manifest.entries[i];
    if (auto hit = cache.lookup(key, hashes[i])) {
      out[u.id] = *hit;
      ++local.cache_hits;
    } else {
      requests.push_back({u.id, u.audio_path});
      hash_of[u.id] = hashes[i];
    }
  }
  local.requests = requests.size();
  if (stats) *stats = local;

  run_adapter(adapter, requests, [&](const std::string& id, const std::string& text) {
    out[id] = text;
    cache.store(key, hash_of.at(id), text);
  });
  return out;
}

}  // namespace srb::harness
