// End-to-end checks of the command-line surface: config handling, dataset
// files, exit codes. The binary path comes from the build system.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using namespace gprf;
namespace fs = std::filesystem;

#ifndef GPRF_CLI_PATH
#error "GPRF_CLI_PATH must be defined by the build"
#endif

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gprf_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GPRF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

}  // namespace

TEST_CASE("cli generate") {
  TempDir tmp;
  SECTION("writes an n-row CSV with the right column count") {
    write_file(tmp.path / "gen.cfg",
               "generator=uniform\nn=100\nseed=5\nout_dir=.\nname=small\n");
    REQUIRE(run_cli("generate --config " + (tmp.path / "gen.cfg").string()) == 0);
    REQUIRE(count_lines(tmp.path / "small.csv") == 101);  // header + rows
    std::ifstream in(tmp.path / "small.csv");
    std::string header;
    std::getline(in, header);
    REQUIRE(std::count(header.begin(), header.end(), ',') == 2 + 2 + 50 - 1);
    REQUIRE(fs::exists(tmp.path / "small.meta"));
    REQUIRE(fs::exists(tmp.path / "manifest.txt"));
    REQUIRE(slurp(tmp.path / "small.meta").find("rng=mt19937_64/boxmuller-v1") !=
            std::string::npos);
  }
  SECTION("same seed twice gives identical files") {
    write_file(tmp.path / "a.cfg",
               "generator=uniform\nn=60\nseed=9\nout_dir=.\nname=a\n");
    write_file(tmp.path / "b.cfg",
               "generator=uniform\nn=60\nseed=9\nout_dir=.\nname=b\n");
    REQUIRE(run_cli("generate --config " + (tmp.path / "a.cfg").string()) == 0);
    REQUIRE(run_cli("generate --config " + (tmp.path / "b.cfg").string()) == 0);
    REQUIRE(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
  }
  SECTION("oversized n is refused with the size-guard exit code") {
    write_file(tmp.path / "big.cfg", "generator=uniform\nn=30000\nout_dir=.\n");
    REQUIRE(run_cli("generate --config " + (tmp.path / "big.cfg").string()) == 3);
  }
  SECTION("unknown keys exit with the validation code") {
    write_file(tmp.path / "bad.cfg", "generator=uniform\nn=10\nbogus_key=1\n");
    REQUIRE(run_cli("generate --config " + (tmp.path / "bad.cfg").string()) == 1);
  }
}

TEST_CASE("cli fit, eval, and summary cross-checks") {
  TempDir tmp;
  write_file(tmp.path / "gen.cfg",
             "generator=uniform\nn=180\nseed=13\nout_dir=.\nname=train\n");
  REQUIRE(run_cli("generate --config " + (tmp.path / "gen.cfg").string()) == 0);

  SECTION("gprf fit writes the full output set; |E| matches the grid rule") {
    write_file(tmp.path / "fit.cfg",
               "dataset=train.csv\nmethod=gprf\npartition=grid\n"
               "cells_per_side=2\nedges=grid8\nmax_iters=8\nworkers=1\n"
               "out_dir=fit_out\n");
    REQUIRE(run_cli("fit --config " + (tmp.path / "fit.cfg").string()) == 0);
    const fs::path out = tmp.path / "fit_out";
    for (const char* f : {"x_hat.csv", "trajectory.csv", "partition.csv",
                          "edges.csv", "summary.txt", "manifest.txt"})
      REQUIRE(fs::exists(out / f));
    // a full 2x2 grid is mutually adjacent: 6 edges
    REQUIRE(slurp(out / "summary.txt").find("num_edges=6") != std::string::npos);
    REQUIRE(count_lines(out / "edges.csv") == 7);

    SECTION("eval recomputes the stored final error") {
      write_file(tmp.path / "eval.cfg",
                 "dataset=train.csv\nx_hat=fit_out/x_hat.csv\nout_dir=eval_out\n");
      REQUIRE(run_cli("eval --config " + (tmp.path / "eval.cfg").string()) == 0);
      const std::string summary = slurp(out / "summary.txt");
      const std::string eval_summary = slurp(tmp.path / "eval_out/eval_summary.txt");
      const auto pick = [](const std::string& text, const std::string& key) {
        const auto pos = text.find(key + "=");
        return text.substr(pos + key.size() + 1,
                           text.find('\n', pos) - pos - key.size() - 1);
      };
      REQUIRE(pick(eval_summary, "final_error") == pick(summary, "final_error"));
    }
  }
  SECTION("bad method exits 1") {
    write_file(tmp.path / "bad.cfg",
               "dataset=train.csv\nmethod=magic\nout_dir=.\n");
    REQUIRE(run_cli("fit --config " + (tmp.path / "bad.cfg").string()) == 1);
  }
  SECTION("missing dataset exits 1") {
    write_file(tmp.path / "bad2.cfg",
               "dataset=missing.csv\nmethod=gprf\nout_dir=.\n");
    REQUIRE(run_cli("fit --config " + (tmp.path / "bad2.cfg").string()) == 1);
  }
}

TEST_CASE("cli verify") {
  REQUIRE(run_cli("verify") == 0);
  REQUIRE(run_cli("verify --inject-q12-bug") == 2);
}
