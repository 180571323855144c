#pragma once

// Runs the dynahoi binary as a child process and captures its output.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dynahoi::checks {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;

  std::string first_line() const { return out.substr(0, out.find('\n')); }
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

/// `env` entries are NAME=value assignments prefixed to the command.
inline CliRun run_cli(const std::string& binary, const std::vector<std::string>& args,
                      const std::vector<std::string>& env = {}) {
  static int counter = 0;
  const fs::path base = fs::temp_directory_path() / ("dynahoi_cli_" + std::to_string(::getpid()) + "_" +
                                                     std::to_string(counter++));
  std::string cmd;
  for (const auto& e : env) cmd += e + " ";
  cmd += shell_quote(binary);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " >" + shell_quote(base.string() + ".out") + " 2>" + shell_quote(base.string() + ".err");
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(base.string() + ".out");
  r.err = slurp(base.string() + ".err");
  std::error_code ec;
  fs::remove(base.string() + ".out", ec);
  fs::remove(base.string() + ".err", ec);
  return r;
}

/// Relative path -> contents for every regular file under `root`.
inline std::vector<std::pair<std::string, std::string>> tree_contents(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).string(), slurp(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dynahoi::checks
