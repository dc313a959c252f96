#include "privade/protocol/socket_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <map>

#include "privade/common/errors.hpp"

namespace privade::protocol {

namespace {

bool write_all(int fd, const Bytes& b) {
  std::size_t off = 0;
  while (off < b.size()) {
    ssize_t w = ::send(fd, b.data() + off, b.size() - off, MSG_NOSIGNAL);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) return false;
    off += static_cast<std::size_t>(w);
  }
  return true;
}

bool read_all(int fd, std::uint8_t* out, std::size_t n) {
  std::size_t off = 0;
  while (off < n) {
    ssize_t r = ::recv(fd, out + off, n - off, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    off += static_cast<std::size_t>(r);
  }
  return true;
}

std::optional<Message> read_message(int fd) {
  std::array<std::uint8_t, 4> len{};
  if (!read_all(fd, len.data(), 4)) return std::nullopt;
  std::uint32_t n = (std::uint32_t{len[0]} << 24) | (std::uint32_t{len[1]} << 16) | (std::uint32_t{len[2]} << 8) | len[3];
  if (n < 11 || n > kMaxFrameBytes) return std::nullopt;
  Bytes frame(4 + n);
  std::memcpy(frame.data(), len.data(), 4);
  if (!read_all(fd, frame.data() + 4, n)) return std::nullopt;
  ByteReader r(frame);
  try {
    return read_frame(r);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool wait_readable(int fd, int timeout_ms) {
  pollfd p{fd, POLLIN, 0};
  for (;;) {
    int rc = ::poll(&p, 1, timeout_ms);
    if (rc < 0 && errno == EINTR) continue;
    return rc > 0;
  }
}

nlohmann::json status_json(const Actor& a) {
  const PartyOutcome& o = a.outcome();
  nlohmann::json j = {{"done", o.done},         {"aborted", o.aborted},
                      {"withdrew", o.withdrew}, {"stage", o.stage},
                      {"code", static_cast<int>(o.code)}, {"reason", o.reason},
                      {"originated", o.originated}, {"checks", a.checks()}};
  if (o.report) {
    ScoreMsg s = to_score_msg(*o.report);
    j["report"] = {s.l, s.u, s.d, s.phi, s.k};
  }
  return j;
}

PartyOutcome outcome_from_json(const nlohmann::json& j) {
  PartyOutcome o;
  o.done = j.at("done").get<bool>();
  o.aborted = j.at("aborted").get<bool>();
  o.withdrew = j.at("withdrew").get<bool>();
  o.stage = j.at("stage").get<int>();
  o.code = static_cast<AbortCode>(j.at("code").get<int>());
  o.reason = j.at("reason").get<std::string>();
  o.originated = j.at("originated").get<bool>();
  if (j.contains("report")) {
    const auto& r = j.at("report");
    o.report = from_score_msg(ScoreMsg{r[0].get<std::int32_t>(), r[1].get<std::int32_t>(), r[2].get<std::int32_t>(),
                                       r[3].get<std::int32_t>(), r[4].get<std::uint64_t>()});
  }
  return o;
}

int connect_to(std::uint16_t port, const std::string& host) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return -1;
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  return fd;
}

[[noreturn]] void party_main(Actor& actor, std::uint16_t port, const std::string& host, int timeout_ms) {
  int fd = connect_to(port, host);
  if (fd < 0) ::_exit(2);
  auto send_all = [&](const std::vector<Message>& out) {
    for (const auto& m : out) write_all(fd, m.encode());
  };
  Bytes hello{static_cast<std::uint8_t>(actor.id())};
  write_all(fd, hello);
  send_all(actor.start());
  while (!actor.finished()) {
    if (!wait_readable(fd, timeout_ms)) {
      send_all(actor.timeout());
      continue;
    }
    auto m = read_message(fd);
    if (!m) {
      send_all(actor.timeout());
      if (!actor.finished()) break;
      continue;
    }
    send_all(actor.receive(*m));
  }
  std::string status = status_json(actor).dump();
  Message done;
  done.kind = MessageKind::Ack;
  done.sender = actor.id();
  done.receiver = PartyId::Hub;
  done.body.assign(status.begin(), status.end());
  write_all(fd, done.encode());
  ::shutdown(fd, SHUT_WR);
  // Drain until the hub closes so late frames never hit a reset socket.
  std::array<std::uint8_t, 4096> sink{};
  while (wait_readable(fd, timeout_ms) && ::recv(fd, sink.data(), sink.size(), 0) > 0) {
  }
  ::close(fd);
  ::_exit(0);
}

}  // namespace

RunResult run_socket(const split::SplitModel& model, const selection::Dataset& data, const RunConfig& config,
                     Adversary adversary) {
  int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) fail(ErrorCode::Io, "socket() failed");
  int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config.port);
  if (::inet_pton(AF_INET, config.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listener);
    fail(ErrorCode::InvalidConfig, "host must be an IPv4 address");
  }
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 4) != 0) {
    ::close(listener);
    fail(ErrorCode::Io, std::string("cannot listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const std::uint16_t port = ntohs(addr.sin_port);
  const int timeout_ms = static_cast<int>(config.timeout_ms);

  std::vector<pid_t> children;
  for (PartyId p : {PartyId::Alice, PartyId::Bob, PartyId::Dealer}) {
    pid_t pid = ::fork();
    if (pid < 0) fail(ErrorCode::Io, "fork failed");
    if (pid == 0) {
      ::close(listener);
      std::unique_ptr<Actor> actor = p == PartyId::Alice ? make_alice(model, config, adversary)
                                     : p == PartyId::Bob ? make_bob(data, config, adversary)
                                                         : make_dealer(config);
      party_main(*actor, port, config.host, timeout_ms);
    }
    children.push_back(pid);
  }

  std::map<PartyId, int> fds;
  while (fds.size() < 3) {
    if (!wait_readable(listener, timeout_ms)) break;
    int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    std::uint8_t id = 0;
    if (!wait_readable(fd, timeout_ms) || !read_all(fd, &id, 1) || id < 1 || id > 3) {
      ::close(fd);
      continue;
    }
    fds[static_cast<PartyId>(id)] = fd;
  }
  ::close(listener);

  Transcript transcript;
  std::uint64_t seq = 0;
  std::map<PartyId, nlohmann::json> status;
  std::map<PartyId, bool> open;
  for (auto& [p, fd] : fds) open[p] = true;
  auto live = [&] {
    std::size_t n = 0;
    for (auto& [p, o] : open) n += o ? 1 : 0;
    return n;
  };
  while (fds.size() == 3 && live() > 0 && status.size() < 3) {
    std::vector<pollfd> polls;
    std::vector<PartyId> who;
    for (auto& [p, fd] : fds) {
      if (!open[p]) continue;
      polls.push_back({fd, POLLIN, 0});
      who.push_back(p);
    }
    int rc = ::poll(polls.data(), polls.size(), 3 * timeout_ms);
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) break;
    for (std::size_t i = 0; i < polls.size(); ++i) {
      if (!(polls[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      auto m = read_message(polls[i].fd);
      if (!m) {
        open[who[i]] = false;
        continue;
      }
      if (m->sender != who[i]) continue;
      if (m->receiver == PartyId::Hub) {
        try {
          status[who[i]] = nlohmann::json::parse(m->body.begin(), m->body.end());
        } catch (const nlohmann::json::exception&) {
          status[who[i]] = nlohmann::json();
        }
        continue;
      }
      m->seq = ++seq;
      transcript.frames.push_back(*m);
      auto target = fds.find(m->receiver);
      if (target != fds.end() && open[m->receiver]) write_all(target->second, m->encode());
    }
  }
  for (auto& [p, fd] : fds) ::close(fd);
  for (pid_t pid : children) {
    int st = 0;
    for (int tries = 0; tries < 50; ++tries) {
      if (::waitpid(pid, &st, WNOHANG) != 0) break;
      if (tries == 49) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &st, 0);
      }
      ::usleep(20000);
    }
  }

  auto outcome = [&](PartyId p) {
    auto it = status.find(p);
    if (it == status.end() || it->second.is_null()) {
      PartyOutcome o;
      o.aborted = true;
      o.code = AbortCode::Timeout;
      o.reason = std::string(to_string(p)) + " exited without reporting";
      return o;
    }
    return outcome_from_json(it->second);
  };
  std::vector<std::string> checks;
  for (PartyId p : {PartyId::Alice, PartyId::Bob, PartyId::Dealer}) {
    auto it = status.find(p);
    if (it != status.end() && it->second.contains("checks")) {
      for (const auto& c : it->second.at("checks")) checks.push_back(c.get<std::string>());
    }
  }
  return summarize(outcome(PartyId::Alice), outcome(PartyId::Bob), outcome(PartyId::Dealer), std::move(checks),
                   std::move(transcript));
}

}  // namespace privade::protocol
