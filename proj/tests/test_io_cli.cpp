#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/cli.hpp"
#include "plap/error.hpp"
#include "plap/io.hpp"

using namespace plap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("plap_test_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "plap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

ErrorCode config_error(const std::string& text) {
  try {
    cli::parse_config_text(text, "test.cfg");
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::acceptance_failure;
}

}  // namespace

TEST_CASE("fnv1a reference values") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("mesh file round trip") {
  TempDir dir;
  const DomainMesh m = build_disk_mesh(1.0, 32, 5);
  io::write_mesh(dir / "m.txt", m, {{"note", "x"}});
  const DomainMesh back = io::read_mesh(dir / "m.txt");
  CHECK(io::mesh_hash(back) == io::mesh_hash(m));
  CHECK(back.vertices() == m.vertices());
  CHECK(back.triangles() == m.triangles());
  CHECK(back.boundary_loop() == m.boundary_loop());
}

TEST_CASE("mesh parser reports line numbers") {
  const std::string text = "# comment\nMESH2D 3 1 3\n0 0\n1 0\nzero 1\n0 1 2\n0 1 2\n";
  try {
    io::parse_mesh(text, "bad.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::mesh_invalid);
    CHECK(std::string(e.what()).find("bad.txt:5") != std::string::npos);
  }
  // Clockwise triangle fails validation.
  CHECK_THROWS_AS(io::parse_mesh("MESH2D 3 1 3\n0 0\n0 1\n1 0\n0 1 2\n0 1 2\n"), Error);
}

TEST_CASE("load files") {
  TempDir dir;
  const DomainMesh m = build_disk_mesh(1.0, 8, 2);
  const LoadField f = make_load(m, {0.1, 1, 2, 3, 4, 5, 6, 1.0 / 3.0});
  io::write_load(dir / "f.txt", f);
  CHECK(io::read_load(dir / "f.txt", m) == f);
  write_file(dir / "short.txt", "1\n2\n");
  CHECK_THROWS_AS(io::read_load(dir / "short.txt", m), Error);
  CHECK(io::parse_load_values("# c\n1.5\n\n-2\n") == std::vector<double>{1.5, -2.0});
  CHECK_THROWS_AS(io::parse_load_values("1 2\n"), Error);
}

TEST_CASE("atomic write leaves no temporary file") {
  TempDir dir;
  io::write_atomic(dir / "sub/a.txt", "hello");
  CHECK(io::read_text(dir / "sub/a.txt") == "hello");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "sub")) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("config parsing") {
  TempDir dir;
  io::write_mesh(dir / "m.txt", build_disk_mesh(1.0, 16, 3));
  const std::string mesh_line = "mesh = " + (dir / "m.txt") + "\n";

  const cli::RunConfig c = cli::parse_config_text(mesh_line + "p = 3\n");
  CHECK(c.command == "solve");
  CHECK(c.solve.p == 3.0);
  CHECK(c.solve.eps_final == 1e-8);
  CHECK(c.solve.newton_tol == 1e-10);

  CHECK(config_error(mesh_line + "p = 0.5\n") == ErrorCode::config_invalid_value);
  CHECK(config_error("p = 2\n") == ErrorCode::config_missing_key);
  CHECK(config_error(mesh_line + "colour = red\n") == ErrorCode::config_unknown_key);
  CHECK(config_error(mesh_line + "p 2\n") == ErrorCode::config_parse);
  CHECK(config_error(mesh_line + "p = 2\np = 3\n") == ErrorCode::config_parse);
  CHECK(config_error(mesh_line + "p = two\n") == ErrorCode::config_invalid_value);
  CHECK(config_error("mesh = /nonexistent/m.txt\n") == ErrorCode::io_read);

  try {
    cli::parse_config_text(mesh_line + "\n# x\nbogus = 1\n", "x.cfg");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("x.cfg:4") != std::string::npos);
  }
}

TEST_CASE("command line: mesh, solve, optimize, derivative") {
  TempDir dir;
  CHECK(run_cli({"mesh", "--shape", "disk", "--n", "16", "--out", dir / "m.txt"}) == 0);
  const DomainMesh m = io::read_mesh(dir / "m.txt");
  CHECK(validate_mesh(m).ok());
  CHECK(m.num_boundary_cells() == 16);

  io::write_load(dir / "zero.txt", constant_load(m, 0.0));
  CHECK(run_cli({"solve", "--mesh", dir / "m.txt", "--load", dir / "zero.txt", "--p", "2", "--out", dir / "s.json"}) ==
        0);
  const auto report = nlohmann::json::parse(io::read_text(dir / "s.json"));
  CHECK(report["report"]["J"].get<double>() == 0.0);
  CHECK(report["mesh_hash"].get<std::string>() == io::mesh_hash(m));
  CHECK(report["tool_version"].get<std::string>() == std::string(io::kToolVersion));

  std::vector<double> v(16, 0.0);
  v[0] = v[1] = v[5] = 1.0;
  io::write_load(dir / "f0.txt", make_load(m, v));
  const std::vector<std::string> opt = {"optimize", "--mesh", dir / "m.txt", "--load0", dir / "f0.txt", "--p", "2",
                                        "--restarts", "2", "--seed", "7", "--out"};
  auto a = opt, b = opt;
  a.push_back(dir / "o1");
  b.push_back(dir / "o2");
  CHECK(run_cli(a) == 0);
  CHECK(run_cli(b) == 0);
  // Same config and seed: byte-identical outputs.
  CHECK(io::read_text(dir / "o1/history.csv") == io::read_text(dir / "o2/history.csv"));
  CHECK(io::read_text(dir / "o1/f_hat.txt") == io::read_text(dir / "o2/f_hat.txt"));
  const auto summary = nlohmann::json::parse(io::read_text(dir / "o1/summary.json"));
  CHECK(summary["defect"].get<double>() == 0.0);
  CHECK(summary["seed"].get<int>() == 7);

  CHECK(run_cli({"derivative", "--mesh", dir / "m.txt", "--load", dir / "f0.txt", "--p", "2", "--field", "cos:1",
                 "--out", dir / "d.json"}) == 0);
  CHECK(fs::exists(dir / "d.csv"));
  const auto d = nlohmann::json::parse(io::read_text(dir / "d.json"));
  CHECK(d["estimates"].size() == 4);
}

TEST_CASE("command line exit statuses") {
  TempDir dir;
  CHECK(run_cli({"mesh", "--n", "16", "--out", dir / "m.txt"}) == 0);
  CHECK(run_cli({"solve", "--mesh", dir / "m.txt", "--p", "0.5"}) == 2);
  CHECK(run_cli({"solve", "--p", "2"}) == 2);
  CHECK(run_cli({"solve", "--mesh", dir / "missing.txt"}) == 2);
  CHECK(run_cli({"mesh", "--shape", "triangle"}) == 2);
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"derivative", "--mesh", dir / "m.txt", "--field", "wave:3"}) == 2);
  CHECK(run_cli({"solve", "--mesh", dir / "m.txt", "--p", "3", "--out", dir / "s.json"}) == 0);
  // A tolerance below roundoff cannot be met: solver failure, report still written.
  write_file(dir / "c.cfg", "command = solve\nmesh = " + (dir / "m.txt") + "\np = 3\nnewton_tol = 1e-30\nmax_newton_iters = 3\nout = " +
                                (dir / "fail.json") + "\n");
  CHECK(run_cli({"run", "--config", dir / "c.cfg"}) == 3);
  CHECK(fs::exists(dir / "fail.json"));
}

TEST_CASE("output directory from the environment") {
  TempDir dir;
  ::setenv(cli::kOutputDirEnv, (dir.path / "env").c_str(), 1);
  CHECK(run_cli({"mesh", "--n", "16"}) == 0);
  ::unsetenv(cli::kOutputDirEnv);
  CHECK(fs::exists(dir.path / "env" / "mesh_disk_16.txt"));
}
