#include "piex/classifier.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstring>
#include <set>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "piex/io.h"
#include "piex/matching.h"

namespace piex {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ValidationError({"invalid " + std::string(what) + " '" +
                           std::string(text) + "'"});
  return v;
}

void check_unit(double v, std::string_view what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ValidationError({std::string(what) + " must lie in [0, 1]"});
}

}  // namespace

//
// PatternScorer
//

PatternScorer::PatternScorer(PatternGraph pattern, double negative,
                             double positive)
    : pattern_(std::move(pattern)), negative_(negative), positive_(positive) {
  check_unit(negative_, "pattern negative score");
  check_unit(positive_, "pattern positive score");
}

PatternScorer PatternScorer::parse(std::string_view spec) {
  const std::string original(spec);
  auto fail = [&](const std::string &why) {
    return ValidationError({"pattern '" + original + "': " + why});
  };

  double negative = 0.0, positive = 1.0;
  if (auto at = spec.find('@'); at != std::string_view::npos) {
    const std::string_view scores = spec.substr(at + 1);
    const auto slash = scores.find('/');
    if (slash == std::string_view::npos)
      throw fail("scores must be written as @NEG/POS");
    negative = parse_number(scores.substr(0, slash), "negative score");
    positive = parse_number(scores.substr(slash + 1), "positive score");
    spec = spec.substr(0, at);
  }

  std::vector<std::pair<NodeId, Atom>> nodes;
  std::vector<std::tuple<NodeId, NodeId, std::optional<BondPair>>> edges;
  std::size_t pos = 0;
  auto read_atom = [&] {
    if (pos < spec.size() && spec[pos] == '*') {
      ++pos;
      return std::string("*");
    }
    if (pos >= spec.size() || !std::isupper(static_cast<unsigned char>(spec[pos])))
      throw fail("expected an element at position " + std::to_string(pos));
    std::string sym(1, spec[pos++]);
    while (pos < spec.size() && std::islower(static_cast<unsigned char>(spec[pos])))
      sym += spec[pos++];
    if (!is_element_symbol(sym))
      throw fail("unknown element '" + sym + "'");
    return sym;
  };

  nodes.emplace_back(0, Atom{read_atom(), 0});
  while (pos < spec.size()) {
    std::optional<BondPair> bond;
    if (spec[pos] == '-') {
      ++pos;
    } else if (spec[pos] == '[') {
      const auto close = spec.find(']', pos);
      const auto comma = spec.find(',', pos);
      if (close == std::string_view::npos || comma == std::string_view::npos ||
          comma > close)
        throw fail("bond must be written as [bR,bP]");
      const double r = parse_number(spec.substr(pos + 1, comma - pos - 1), "bond order");
      const double p = parse_number(spec.substr(comma + 1, close - comma - 1), "bond order");
      auto br = BondOrder::try_from_double(r);
      auto bp = BondOrder::try_from_double(p);
      if (!br || !bp || (br->is_zero() && bp->is_zero()))
        throw fail("bond orders must come from {0, 1, 1.5, 2, 3} and not be (0,0)");
      bond = BondPair{*br, *bp};
      pos = close + 1;
    } else {
      throw fail("expected '-' or '[' at position " + std::to_string(pos));
    }
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.emplace_back(id, Atom{read_atom(), 0});
    edges.emplace_back(id - 1, id, bond);
  }

  PatternScorer s(PatternGraph(std::move(nodes), std::move(edges)), negative,
                  positive);
  s.spec_ = original;
  return s;
}

bool PatternScorer::matches(const LabeledGraph &g) const {
  return is_subgraph_isomorphic(
      pattern_, g, AtomMatch{.match_charge = false},
      [](const std::optional<BondPair> &want, const BondPair &have) {
        return !want || *want == have;
      });
}

std::vector<double> PatternScorer::score(std::span<const LabeledGraph> graphs) {
  std::vector<double> out;
  out.reserve(graphs.size());
  for (const LabeledGraph &g : graphs)
    out.push_back(matches(g) ? positive_ : negative_);
  return out;
}

std::string PatternScorer::describe() const {
  if (!spec_.empty())
    return "pattern:" + spec_;
  return "pattern:<" + std::to_string(pattern_.node_count()) + " atoms>";
}

//
// SizeScorer / TableScorer
//

std::vector<double> SizeScorer::score(std::span<const LabeledGraph> graphs) {
  std::vector<double> out;
  out.reserve(graphs.size());
  for (const LabeledGraph &g : graphs)
    out.push_back(g.edge_count() >= min_edges_ ? 1.0 : 0.0);
  return out;
}

std::string SizeScorer::describe() const {
  return "size:" + std::to_string(min_edges_);
}

TableScorer::TableScorer(std::map<std::string, double> table,
                         double default_score)
    : table_(std::move(table)), default_(default_score) {
  check_unit(default_, "table default score");
  for (const auto &[k, v] : table_)
    check_unit(v, "table score for '" + k + "'");
}

TableScorer TableScorer::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ValidationError({std::string("malformed table JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  double fallback = 0.0;
  std::map<std::string, double> table;
  if (!doc.is_object()) {
    throw ValidationError({"table document must be an object"});
  }
  if (doc.contains("default")) {
    if (doc["default"].is_number())
      fallback = doc["default"].get<double>();
    else
      problems.push_back("\"default\" must be a number");
  }
  if (doc.contains("scores") && doc["scores"].is_object()) {
    for (const auto &[k, v] : doc["scores"].items()) {
      if (!v.is_number())
        problems.push_back("score for '" + k + "' must be a number");
      else
        table.emplace(k, v.get<double>());
    }
  } else if (doc.contains("scores")) {
    problems.push_back("\"scores\" must be an object");
  }
  if (!problems.empty())
    throw ValidationError(std::move(problems));
  return TableScorer(std::move(table), fallback);
}

std::string TableScorer::key(const LabeledGraph &g) {
  std::string out;
  for (const Edge &e : g.edges()) {
    if (!out.empty())
      out += ',';
    out += std::to_string(e.u) + "-" + std::to_string(e.v);
  }
  return out;
}

std::vector<double> TableScorer::score(std::span<const LabeledGraph> graphs) {
  std::vector<double> out;
  out.reserve(graphs.size());
  for (const LabeledGraph &g : graphs) {
    auto it = table_.find(key(g));
    out.push_back(it == table_.end() ? default_ : it->second);
  }
  return out;
}

std::string TableScorer::describe() const {
  return "table:" + std::to_string(table_.size()) + " entries";
}

//
// ExternalScorer
//

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() <= 0 ? 0 : static_cast<int>(left.count());
}

void set_nonblocking(int fd) {
  ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
}

std::optional<std::string> take_line(std::string &buffer) {
  const auto nl = buffer.find('\n');
  if (nl == std::string::npos)
    return std::nullopt;
  std::string line = buffer.substr(0, nl);
  buffer.erase(0, nl + 1);
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  return line;
}

}  // namespace

ExternalScorer::ExternalScorer(std::string command,
                               std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  std::signal(SIGPIPE, SIG_IGN);
  int in[2], out[2];
  if (::pipe2(in, O_CLOEXEC) != 0)
    throw ScoringError("cannot create pipe: " + std::string(std::strerror(errno)));
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw ScoringError("cannot create pipe: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in[0], in[1], out[0], out[1]})
      ::close(fd);
    throw ScoringError("cannot fork: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    // own process group, so shutdown reaches whatever the shell started
    ::setpgid(0, 0);
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in[0]);
  ::close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  set_nonblocking(to_child_);
  set_nonblocking(from_child_);

  try {
    const std::string line = read_line(Clock::now() + timeout_);
    nlohmann::json hs;
    try {
      hs = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &) {
      throw ScoringError("malformed handshake from '" + command_ + "': " + line);
    }
    if (!hs.is_object() || !hs.contains("protocol") ||
        !hs["protocol"].is_string() ||
        hs["protocol"].get<std::string>() != kProtocolVersion)
      throw ScoringError("scorer '" + command_ + "' does not speak " +
                         std::string(kProtocolVersion) + ": " + line);
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalScorer::~ExternalScorer() { shutdown(); }

std::string ExternalScorer::read_line(Clock::time_point deadline) {
  for (;;) {
    if (auto line = take_line(buffer_))
      return *line;
    pollfd p{from_child_, POLLIN, 0};
    const int ready = ::poll(&p, 1, remaining_ms(deadline));
    if (ready < 0 && errno == EINTR)
      continue;
    if (ready == 0)
      throw ScoringError("timed out waiting for scorer '" + command_ + "'");
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof chunk);
    if (got > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(got));
    } else if (got == 0) {
      throw ScoringError("scorer '" + command_ + "' closed its output");
    } else if (errno != EAGAIN && errno != EINTR) {
      throw ScoringError("reading from scorer failed: " +
                         std::string(std::strerror(errno)));
    }
  }
}

std::vector<double> ExternalScorer::score(std::span<const LabeledGraph> graphs) {
  std::lock_guard lock(mutex_);
  if (pid_ < 0)
    throw ScoringError("scorer '" + command_ + "' is no longer running");
  const auto deadline = Clock::now() + timeout_;

  std::map<std::string, std::size_t> pending;
  std::string outgoing;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const std::string id = std::to_string(next_id_++);
    pending.emplace(id, i);
    outgoing += "{\"id\":\"" + id + "\",\"graph\":" +
                serialize_its(graphs[i], {}, JsonStyle::kCompact) + "}\n";
  }
  std::vector<double> scores(graphs.size(), 0.0);
  std::size_t written = 0;

  try {
    while (!pending.empty()) {
      while (auto line = take_line(buffer_)) {
        nlohmann::json r;
        try {
          r = nlohmann::json::parse(*line);
        } catch (const nlohmann::json::parse_error &) {
          throw ScoringError("malformed response from scorer: " + *line);
        }
        if (!r.is_object())
          throw ScoringError("malformed response from scorer: " + *line);
        if (r.contains("error"))
          throw ScoringError("scorer reported an error: " + *line);
        if (!r.contains("id") || !r["id"].is_string())
          throw ScoringError("response without a request id: " + *line);
        auto it = pending.find(r["id"].get<std::string>());
        if (it == pending.end())
          throw ScoringError("response for unknown or repeated id: " + *line);
        if (!r.contains("score") || !r["score"].is_number())
          throw ScoringError("response without a numeric score: " + *line);
        scores[it->second] = r["score"].get<double>();
        pending.erase(it);
      }
      if (pending.empty())
        break;

      pollfd fds[2] = {{from_child_, POLLIN, 0}, {to_child_, POLLOUT, 0}};
      const nfds_t count = written < outgoing.size() ? 2 : 1;
      const int ready = ::poll(fds, count, remaining_ms(deadline));
      if (ready < 0 && errno == EINTR)
        continue;
      if (ready == 0)
        throw ScoringError("timed out after " +
                           std::to_string(timeout_.count()) +
                           " ms waiting for scorer '" + command_ + "'");
      if (count == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t n = ::write(to_child_, outgoing.data() + written,
                                  outgoing.size() - written);
        if (n > 0)
          written += static_cast<std::size_t>(n);
        else if (n < 0 && errno != EAGAIN && errno != EINTR)
          throw ScoringError("scorer '" + command_ +
                             "' stopped reading requests: " +
                             std::strerror(errno));
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char chunk[65536];
        const ssize_t got = ::read(from_child_, chunk, sizeof chunk);
        if (got > 0) {
          buffer_.append(chunk, static_cast<std::size_t>(got));
        } else if (got == 0) {
          int status = 0;
          std::string why = "closed its output";
          if (::waitpid(pid_, &status, 0) == pid_) {
            pid_ = -1;
            if (WIFEXITED(status))
              why = "exited with status " + std::to_string(WEXITSTATUS(status));
            else if (WIFSIGNALED(status))
              why = "was killed by signal " + std::to_string(WTERMSIG(status));
          }
          throw ScoringError("scorer '" + command_ + "' " + why + " with " +
                             std::to_string(pending.size()) +
                             " requests unanswered");
        } else if (errno != EAGAIN && errno != EINTR) {
          throw ScoringError("reading from scorer failed: " +
                             std::string(std::strerror(errno)));
        }
      }
    }
  } catch (...) {
    shutdown();
    throw;
  }
  return scores;
}

void ExternalScorer::shutdown() noexcept {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (pid_ > 0) {
    // closing stdin asks a well-behaved plugin to exit; give it a moment
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 50 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    } else {
      ::kill(-pid_, SIGKILL);  // stragglers left behind by the shell
    }
    pid_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
}

//
// Decisions
//

DecisionFunction::DecisionFunction(std::shared_ptr<Scorer> scorer,
                                   double threshold)
    : scorer_(std::move(scorer)), threshold_(threshold) {
  if (!scorer_)
    throw DomainError("decision function needs a scorer");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw DomainError("threshold must lie in (0, 1)");
}

std::vector<double> classify_batch(const DecisionFunction &clf,
                                   std::span<const LabeledGraph> graphs) {
  if (graphs.empty())
    return {};
  std::vector<double> scores = clf.scorer().score(graphs);
  if (scores.size() != graphs.size())
    throw ScoringError("scorer returned " + std::to_string(scores.size()) +
                       " scores for " + std::to_string(graphs.size()) +
                       " graphs");
  for (double s : scores)
    if (!std::isfinite(s) || s < 0.0 || s > 1.0)
      throw ScoringError("score " + std::to_string(s) + " outside [0, 1]");
  return scores;
}

bool decide(const DecisionFunction &clf, const LabeledGraph &graph) {
  return is_positive(classify_batch(clf, std::span(&graph, 1)).front(),
                     clf.threshold());
}

std::shared_ptr<Scorer> make_scorer(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (colon == std::string_view::npos || arg.empty())
    throw ValidationError({"classifier must be pattern:SPEC, size:N, "
                           "table:FILE or external:CMD"});
  if (kind == "pattern")
    return std::make_shared<PatternScorer>(PatternScorer::parse(arg));
  if (kind == "size") {
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec != std::errc() || end != arg.data() + arg.size())
      throw ValidationError({"size classifier needs a non-negative integer"});
    return std::make_shared<SizeScorer>(n);
  }
  if (kind == "table")
    return std::make_shared<TableScorer>(
        TableScorer::from_json(read_text_file(std::string(arg))));
  if (kind == "external")
    return std::make_shared<ExternalScorer>(std::string(arg));
  throw ValidationError({"unknown classifier kind '" + std::string(kind) + "'"});
}

}  // namespace piex
