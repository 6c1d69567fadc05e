#pragma once

// Drives the command-line tool in-process and through the built binary, and
// writes a small fixture directory that exercises every subcommand.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "conifold_fixture.hpp"

namespace oracle {

namespace fs = std::filesystem;
using k3pt::json;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string> &args) {
  std::vector<const char *> argv{"k3pt"};
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = k3pt::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string shell_quote(const std::string &s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

/// Runs the built executable; stdout and stderr go through files in `scratch`.
inline CliResult run_binary(const std::string &exe, const std::vector<std::string> &args, const fs::path &scratch) {
  std::string cmd = shell_quote(exe);
  for (const auto &a : args) cmd += " " + shell_quote(a);
  const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  cmd += " >" + shell_quote(out.string()) + " 2>" + shell_quote(err.string());
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = k3pt::io::read_file(out.string());
  r.err = k3pt::io::read_file(err.string());
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &tag) {
    path = fs::temp_directory_path() / ("k3pt-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  [[nodiscard]] std::string file(const std::string &name) const { return (path / name).string(); }
};

inline void write_json(const std::string &path, const json &doc) { k3pt::io::write_file(path, k3pt::io::dump(doc)); }

inline json map_json(const k3pt::PushforwardMap &map, const std::vector<CurveClass> &exceptional) {
  json doc{{"format", "k3pt.map/1"},
           {"source", k3pt::to_json(*map.source)},
           {"target", k3pt::to_json(*map.target)},
           {"matrix", map.matrix}};
  if (!exceptional.empty()) doc["exceptional"] = exceptional;
  return doc;
}

inline MonoidPtr wall_monoid() {
  return std::make_shared<const k3pt::ClassMonoid>(std::vector<std::string>{"b1", "b2", "b3", "c"},
                                                   std::vector<std::int64_t>{1, 1, 1, 2});
}

/// Writes every input file the subcommands below need.
inline void write_fixtures(const TempDir &dir, std::uint64_t seed) {
  Gen g(seed);
  auto base = k3pt::ClassMonoid::single("g");
  k3pt::NLTable nl{base, -1, 3, {}, {}, std::string("transverse")};
  nl.add_class("g1", {1});
  nl.add_class("g2", {2});
  for (const auto &id : {"g1", "g2"})
    for (std::int64_t h = -1; h <= 3; ++h)
      if (g.coin(0.7)) nl.add(h, id, g.rational());
  write_json(dir.file("nl.json"), k3pt::to_json(nl));

  k3pt::FiberIntegralTable fiber;
  fiber.declared = k3pt::FiberIntegralTable::Coverage{-1, 3, -2, 6};
  for (std::int64_t h = -1; h <= 3; ++h)
    for (std::int64_t n = -2; n <= 6; ++n)
      if (g.coin(0.6)) fiber.add(n, h, g.rational());
  write_json(dir.file("fiber.json"), k3pt::to_json(fiber));

  write_json(dir.file("j.json"), k3pt::to_json(g.jtable(wall_monoid(), 3, 5, 3, 10)));

  auto t = make_triple(g, 2, 2, 4);
  write_json(dir.file("resolved.json"), k3pt::to_json(t.resolved));
  write_json(dir.file("base.json"), k3pt::to_json(t.base));
  write_json(dir.file("map.json"), map_json(t.map, t.exceptional));

  auto m = std::make_shared<const k3pt::ClassMonoid>(std::vector<std::string>{"x", "y"},
                                                     std::vector<std::int64_t>{1, 2});
  write_json(dir.file("a.json"), k3pt::to_json(g.unit(m, Window(3, -1, 6), 6)));
  write_json(dir.file("b.json"), k3pt::to_json(g.series(m, Window(3, 0, 5), 6)));
  write_json(dir.file("c.json"), k3pt::to_json(g.series(m, Window(3, 0, 5), 6, 1)));
}

/// One invocation per subcommand (and per mode where modes differ).
inline std::vector<std::vector<std::string>> subcommand_invocations(const TempDir &d) {
  return {
      {"ky", "--hmax", "4", "--nmax", "6"},
      {"pth", "--classes", "e1,e2", "--generators", "b,e1,e2", "--window-d", "3", "--qmin", "0", "--qmax", "6"},
      {"assemble", "--hmax", "3", "--nmax", "6", "--nl", d.file("nl.json")},
      {"assemble", "--hmax", "3", "--nmax", "6", "--nl", d.file("nl.json"), "--mode", "perverse", "--unit"},
      {"assemble", "--mode", "generic", "--fiber", d.file("fiber.json"), "--nl", d.file("nl.json"),
       "--special-case", "smooth fibration"},
      {"conifold-check", "--resolved", d.file("resolved.json"), "--base", d.file("base.json"), "--map",
       d.file("map.json")},
      {"wc-forward", "--j", d.file("j.json")},
      {"wc-forward", "--j", d.file("j.json"), "--mode", "euler"},
      {"wc-invert", "--pt", d.file("resolved.json"), "--class", "b", "--r-max", "1"},
      {"series", "add", d.file("a.json"), d.file("b.json")},
      {"series", "mul", d.file("a.json"), d.file("b.json")},
      {"series", "inv", d.file("a.json")},
      {"series", "exp", d.file("c.json")},
      {"series", "log", d.file("a.json")},
      {"series", "pow", d.file("a.json"), "--power", "3"},
      {"series", "pushforward", d.file("resolved.json"), "--map", d.file("map.json")},
      {"series", "coeff", d.file("a.json"), "--class", "x", "--n", "2"},
  };
}

inline std::vector<std::string> with_threads(std::vector<std::string> args, int threads) {
  args.insert(args.begin(), {"--threads", std::to_string(threads)});
  return args;
}

inline std::string describe(const std::vector<std::string> &args) {
  std::string s;
  for (std::size_t i = 0; i < args.size() && i < 2; ++i) s += (i ? " " : "") + args[i];
  return s;
}

} // namespace oracle
