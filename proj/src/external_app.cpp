#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "ppress/error.hpp"
#include "ppress/quality.hpp"

namespace ppress {

namespace {

namespace fs = std::filesystem;

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void replace_all(std::string& s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "ppress-app-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw ApplicationError("cannot create temporary directory");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Finds "metric: <name>=<value>" lines; prefers the one naming `metric`.
std::optional<double> parse_metric_output(const std::string& text, std::string_view metric) {
  std::istringstream in(text);
  std::string line;
  std::optional<double> first;
  std::optional<double> named;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.rfind("metric:", 0) != 0) continue;
    const std::string rest = trim(std::string_view(t).substr(7));
    const auto eq = rest.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = trim(std::string_view(rest).substr(0, eq));
    const std::string val = trim(std::string_view(rest).substr(eq + 1));
    char* end = nullptr;
    const double v = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') continue;
    if (!first) first = v;
    if (lower(name) == lower(metric)) named = v;
  }
  return named ? named : first;
}

}  // namespace

AppResult run_external(const Dataset& train, const Dataset& validation, const Application& app,
                       std::uint64_t seed) {
  TempDir dir;
  const std::string train_path = (dir.path / "train.bin").string();
  const std::string val_path = (dir.path / "validation.bin").string();
  const std::string result_path = (dir.path / "result.txt").string();
  save_raw(train, train_path);
  save_raw(validation, val_path);

  std::string cmd = app.external.command;
  replace_all(cmd, "{train}", shell_quote(train_path));
  replace_all(cmd, "{validation}", shell_quote(val_path));
  replace_all(cmd, "{result}", shell_quote(result_path));
  replace_all(cmd, "{seed}", std::to_string(seed));

  int pipefd[2];
  if (pipe(pipefd) != 0) throw ApplicationError("pipe() failed");
  const pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    throw ApplicationError("fork() failed");
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipefd[1], STDOUT_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(pipefd[1]);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(app.external.timeout_seconds);
  std::string output;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - std::chrono::steady_clock::now())
                          .count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{pipefd[0], POLLIN, 0};
    const int pr = poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (pr < 0 && errno == EINTR) continue;
    if (pr == 0) continue;
    const ssize_t n = read(pipefd[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  close(pipefd[0]);
  if (timed_out) kill(-pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw ApplicationError("external application '" + app.id + "' timed out");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw ApplicationError("external application '" + app.id + "' failed with status " +
                           std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }

  std::optional<double> psi = parse_metric_output(output, to_string(app.metric.name));
  if (!psi && fs::exists(result_path)) {
    std::ifstream in(result_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    psi = parse_metric_output(text, to_string(app.metric.name));
    if (!psi) {
      const std::string t = trim(text);
      char* end = nullptr;
      const double v = std::strtod(t.c_str(), &end);
      if (end != t.c_str() && *end == '\0') psi = v;
    }
  }
  if (!psi) {
    throw ApplicationError("external application '" + app.id + "' printed no parsable metric");
  }
  return {*psi, false, 0};
}

}  // namespace ppress
