#include "smt/solver.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace smt {

namespace {

struct Tok {
  enum class Kind { LParen, RParen, Atom };
  Kind kind;
  std::string text;
};

std::vector<Tok> tokenize(const std::string &s) {
  std::vector<Tok> toks;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      i++;
    } else if (c == '(') {
      toks.push_back({Tok::Kind::LParen, "("});
      i++;
    } else if (c == ')') {
      toks.push_back({Tok::Kind::RParen, ")"});
      i++;
    } else if (c == '|') {
      size_t j = s.find('|', i + 1);
      if (j == std::string::npos)
        j = s.size() - 1;
      toks.push_back({Tok::Kind::Atom, s.substr(i + 1, j - i - 1)});
      i = j + 1;
    } else if (c == '"') {
      size_t j = s.find('"', i + 1);
      if (j == std::string::npos)
        j = s.size() - 1;
      toks.push_back({Tok::Kind::Atom, s.substr(i + 1, j - i - 1)});
      i = j + 1;
    } else {
      size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) &&
             s[j] != '(' && s[j] != ')')
        j++;
      toks.push_back({Tok::Kind::Atom, s.substr(i, j - i)});
      i = j;
    }
  }
  return toks;
}

bool parse_bv_literal(const std::vector<Tok> &toks, size_t &i, uint64_t &out) {
  if (i >= toks.size())
    return false;
  const Tok &t = toks[i];
  if (t.kind == Tok::Kind::Atom) {
    const std::string &a = t.text;
    if (a.size() > 2 && a[0] == '#' && a[1] == 'x') {
      out = std::stoull(a.substr(2), nullptr, 16);
      i++;
      return true;
    }
    if (a.size() > 2 && a[0] == '#' && a[1] == 'b') {
      out = std::stoull(a.substr(2), nullptr, 2);
      i++;
      return true;
    }
    if (a == "true") {
      out = 1;
      i++;
      return true;
    }
    if (a == "false") {
      out = 0;
      i++;
      return true;
    }
    if (!a.empty() && std::isdigit(static_cast<unsigned char>(a[0]))) {
      out = std::stoull(a);
      i++;
      return true;
    }
    return false;
  }
  // (_ bvN W)
  if (t.kind == Tok::Kind::LParen && i + 3 < toks.size() &&
      toks[i + 1].text == "_" && toks[i + 2].text.rfind("bv", 0) == 0 &&
      toks[i + 4].kind == Tok::Kind::RParen) {
    out = std::stoull(toks[i + 2].text.substr(2));
    i += 5;
    return true;
  }
  return false;
}

void skip_sexpr(const std::vector<Tok> &toks, size_t &i) {
  if (i >= toks.size())
    return;
  if (toks[i].kind != Tok::Kind::LParen) {
    i++;
    return;
  }
  int depth = 0;
  while (i < toks.size()) {
    if (toks[i].kind == Tok::Kind::LParen)
      depth++;
    else if (toks[i].kind == Tok::Kind::RParen)
      depth--;
    i++;
    if (depth == 0)
      return;
  }
}

} // namespace

Result parse_response(const std::string &text) {
  Result r;
  r.diag = text;
  std::vector<Tok> toks = tokenize(text);
  size_t i = 0;
  // Find the verdict, skipping warnings and echoed junk.
  for (; i < toks.size(); ++i) {
    if (toks[i].kind != Tok::Kind::Atom)
      continue;
    if (toks[i].text == "sat") {
      r.sat = Sat::Sat;
      break;
    }
    if (toks[i].text == "unsat") {
      r.sat = Sat::Unsat;
      break;
    }
    if (toks[i].text == "unknown") {
      r.sat = Sat::Unknown;
      break;
    }
  }
  if (r.sat != Sat::Sat)
    return r;
  i++;
  // ((|name| value) (|name| value) ...)
  if (i < toks.size() && toks[i].kind == Tok::Kind::LParen) {
    i++;
    while (i < toks.size() && toks[i].kind == Tok::Kind::LParen) {
      i++;
      if (i >= toks.size() || toks[i].kind != Tok::Kind::Atom)
        break;
      std::string name = toks[i].text;
      i++;
      uint64_t v = 0;
      if (parse_bv_literal(toks, i, v))
        r.model[name] = v;
      else
        skip_sexpr(toks, i);
      while (i < toks.size() && toks[i].kind != Tok::Kind::RParen)
        skip_sexpr(toks, i);
      if (i < toks.size())
        i++; // closing paren of the pair
    }
  }
  return r;
}

namespace {

// Run the command with the given stdin, capturing stdout. Returns false on
// timeout or spawn failure.
bool run_process(const std::string &command, const std::string &input,
                 int timeout_ms, std::string &output, std::string &err) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    err = "pipe failed";
    return false;
  }
  pid_t pid = fork();
  if (pid < 0) {
    err = "fork failed";
    return false;
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0)
      dup2(devnull, STDERR_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), (char *)nullptr);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  // Feed stdin; the solvers we drive read the whole script before answering,
  // so a blocking write here is safe for our input sizes, but use non-blocking
  // IO anyway to be safe against full pipes.
  signal(SIGPIPE, SIG_IGN);
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);

  size_t written = 0;
  bool in_open = true;
  output.clear();
  auto started = std::chrono::steady_clock::now();
  while (true) {
    struct pollfd fds[2];
    int nfds = 0;
    int out_idx = -1, in_idx = -1;
    fds[nfds] = {out_pipe[0], POLLIN, 0};
    out_idx = nfds++;
    if (in_open) {
      fds[nfds] = {in_pipe[1], POLLOUT, 0};
      in_idx = nfds++;
    }
    int rc = poll(fds, nfds, 100);
    if (rc < 0 && errno != EINTR) {
      err = "poll failed";
      break;
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    if (elapsed >= timeout_ms) {
      kill(pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      close(out_pipe[0]);
      if (in_open)
        close(in_pipe[1]);
      err = "timeout";
      return false;
    }
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        close(in_pipe[1]);
        in_open = false;
      } else {
        ssize_t n = write(in_pipe[1], input.data() + written,
                          input.size() - written);
        if (n > 0)
          written += static_cast<size_t>(n);
        if (written >= input.size() || (n < 0 && errno != EAGAIN)) {
          close(in_pipe[1]);
          in_open = false;
        }
      }
    }
    if (fds[out_idx].revents & (POLLIN | POLLHUP)) {
      char buf[4096];
      ssize_t n;
      while ((n = read(out_pipe[0], buf, sizeof buf)) > 0)
        output.append(buf, static_cast<size_t>(n));
      if (n == 0) {
        close(out_pipe[0]);
        if (in_open)
          close(in_pipe[1]);
        waitpid(pid, nullptr, 0);
        return true;
      }
    }
  }
  close(out_pipe[0]);
  if (in_open)
    close(in_pipe[1]);
  kill(pid, SIGKILL);
  waitpid(pid, nullptr, 0);
  return false;
}

} // namespace

Result ExternalSolver::check(const Query &q) {
  std::string script = to_smtlib(q);
  std::string out, err;
  if (!run_process(command_, script, timeout_ms_, out, err)) {
    Result r;
    r.sat = Sat::Unknown;
    r.diag = "solver process failed: " + err;
    return r;
  }
  return parse_response(out);
}

} // namespace smt
