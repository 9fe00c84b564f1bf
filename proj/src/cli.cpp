#include "plap/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "plap/error.hpp"
#include "plap/perturbation.hpp"
#include "plap_verify/acceptance.hpp"

namespace plap::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest representation that round-trips.
std::string num(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::config_invalid_value, what); }

template <class T>
T parse_value(const std::string& text, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    invalid(where + ": cannot parse '" + text + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) invalid(where + ": value must be finite");
  }
  return value;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& where) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_value<int>(item, where));
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"command", [](RunConfig& c, const std::string& v, const std::string&) { c.command = v; }},
      {"shape", [](RunConfig& c, const std::string& v, const std::string&) { c.shape = v; }},
      {"n", [](RunConfig& c, const std::string& v, const std::string& w) { c.n = parse_value<int>(v, w); }},
      {"n_radial",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.n_radial = parse_value<int>(v, w); }},
      {"size", [](RunConfig& c, const std::string& v, const std::string& w) { c.size = parse_value<double>(v, w); }},
      {"mesh", [](RunConfig& c, const std::string& v, const std::string&) { c.mesh_path = v; }},
      {"load", [](RunConfig& c, const std::string& v, const std::string&) { c.load_path = v; }},
      {"p", [](RunConfig& c, const std::string& v, const std::string& w) { c.solve.p = parse_value<double>(v, w); }},
      {"eps_initial",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.solve.eps_initial = parse_value<double>(v, w); }},
      {"eps_final",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.solve.eps_final = parse_value<double>(v, w); }},
      {"eps_factor",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.solve.eps_factor = parse_value<double>(v, w); }},
      {"newton_tol",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.solve.newton_tol = parse_value<double>(v, w); }},
      {"max_newton_iters",
       [](RunConfig& c, const std::string& v, const std::string& w) {
         c.solve.max_newton_iters = parse_value<int>(v, w);
       }},
      {"restarts",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.restarts = parse_value<int>(v, w); }},
      {"max_outer_iters",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.max_outer_iters = parse_value<int>(v, w); }},
      {"j_tol", [](RunConfig& c, const std::string& v, const std::string& w) { c.j_tol = parse_value<double>(v, w); }},
      {"neighbour_budget",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.neighbour_budget = parse_value<int>(v, w); }},
      {"field", [](RunConfig& c, const std::string& v, const std::string&) { c.field = v; }},
      {"t", [](RunConfig& c, const std::string& v, const std::string& w) { c.t = parse_value<double>(v, w); }},
      {"collar",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.collar = parse_value<double>(v, w); }},
      {"suite", [](RunConfig& c, const std::string& v, const std::string&) { c.suite = v; }},
      {"criteria",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.criteria = parse_int_list(v, w); }},
      {"seed",
       [](RunConfig& c, const std::string& v, const std::string& w) { c.seed = parse_value<std::uint64_t>(v, w); }},
      {"out", [](RunConfig& c, const std::string& v, const std::string&) { c.out = v; }},
  };
  return s;
}

bool needs_mesh(const std::string& command) {
  return command == "solve" || command == "optimize" || command == "derivative";
}

void require_file(const std::string& path, const std::string& key) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::io_read, key + ": file '" + path + "' does not exist");
  }
}

fs::path output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? fs::path(env) : fs::path(".");
}

fs::path output_path(const RunConfig& c, const std::string& fallback) {
  return c.out.empty() ? output_dir() / fallback : fs::path(c.out);
}

Json header(const RunConfig& c, const DomainMesh* mesh) {
  Json j;
  j["tool_version"] = std::string(io::kToolVersion);
  j["command"] = c.command;
  j["seed"] = c.seed;
  if (mesh) j["mesh_hash"] = io::mesh_hash(*mesh);
  Json cfg = Json::object();
  for (const auto& [k, v] : c.echo()) cfg[k] = v;
  j["config"] = std::move(cfg);
  return j;
}

io::Echo csv_echo(const RunConfig& c, const DomainMesh* mesh) {
  io::Echo e = {{"tool_version", std::string(io::kToolVersion)}};
  if (mesh) e.emplace_back("mesh_hash", io::mesh_hash(*mesh));
  for (auto& kv : c.echo()) e.push_back(kv);
  return e;
}

void write_json(const fs::path& path, const Json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

LoadField load_or_unit(const RunConfig& c, const DomainMesh& mesh) {
  return c.load_path.empty() ? constant_load(mesh, 1.0) : io::read_load(c.load_path, mesh);
}

Json solve_json(const SolveReport& r) {
  Json j;
  j["converged"] = r.converged;
  j["J"] = r.J;
  j["I"] = r.I;
  j["gap"] = r.duality_gap;
  j["residual"] = r.residual_norm;
  j["iterations"] = r.total_iterations();
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"epsilon", s.epsilon},
                      {"iterations", s.iterations},
                      {"gradient_steps", s.gradient_steps},
                      {"residual", s.residual_norm},
                      {"converged", s.converged},
                      {"energy_first", s.energy.empty() ? 0.0 : s.energy.front()},
                      {"energy_last", s.energy.empty() ? 0.0 : s.energy.back()}});
  }
  j["stages"] = std::move(stages);
  return j;
}

int run_mesh(const RunConfig& c) {
  const DomainMesh mesh = c.shape == "disk"
                              ? build_disk_mesh(c.size, c.n, c.n_radial > 0 ? c.n_radial : default_radial_count(c.n))
                              : build_square_mesh(c.size, c.n);
  const fs::path out = output_path(c, "mesh_" + c.shape + "_" + std::to_string(c.n) + ".txt");
  io::write_mesh(out, mesh, c.echo());
  std::cout << "wrote " << out.string() << " (" << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
            << " triangles, " << mesh.num_boundary_cells() << " boundary cells, hash " << io::mesh_hash(mesh)
            << ")\n";
  return 0;
}

int run_solve(const RunConfig& c) {
  const DomainMesh mesh = io::read_mesh(c.mesh_path);
  const LoadField f = load_or_unit(c, mesh);
  const SolveResult r = solve(mesh, f, c.solve);
  Json j = header(c, &mesh);
  j["report"] = solve_json(r.report);
  const fs::path out = output_path(c, "solve.json");
  write_json(out, j);
  require_converged(r, "solve");
  std::cout << "J = " << num(r.report.J) << ", I = " << num(r.report.I) << ", gap = " << num(r.report.duality_gap)
            << " -> " << out.string() << "\n";
  return 0;
}

int run_optimize(const RunConfig& c) {
  const DomainMesh mesh = io::read_mesh(c.mesh_path);
  const LoadField f0 = load_or_unit(c, mesh);
  const OptimizeResult r = maximize_over_rearrangements(mesh, f0, c.optimize_config());
  const fs::path dir = output_path(c, "optimize");

  io::write_load(dir / "f_hat.txt", r.f_hat, csv_echo(c, &mesh));

  std::string csv = io::echo_comments(csv_echo(c, &mesh));
  csv += "restart,iter,move,J,gap,defect,permutation_changed,ties\n";
  for (const auto& o : r.restarts) {
    for (const auto& rec : o.history.records) {
      csv += std::to_string(o.index) + "," + std::to_string(rec.iter) + "," + move_name(rec.move) + "," +
             io::format_double(rec.J) + "," + io::format_double(rec.gap) + "," + io::format_double(rec.defect) +
             "," + (rec.permutation_changed ? "1" : "0") + "," + std::to_string(rec.ties) + "\n";
    }
  }
  io::write_atomic(dir / "history.csv", csv);

  Json j = header(c, &mesh);
  j["J"] = r.eval.J;
  j["gap"] = r.eval.gap;
  j["defect"] = r.eval.defect;
  j["ties"] = r.eval.ties;
  j["best_restart"] = r.best_restart;
  Json restarts = Json::array();
  for (const auto& o : r.restarts) {
    restarts.push_back({{"index", o.index},
                        {"J", o.J},
                        {"defect", o.defect},
                        {"stop", stop_reason_name(o.stop)},
                        {"iterations", o.history.records.size()}});
  }
  j["restarts"] = std::move(restarts);
  write_json(dir / "summary.json", j);
  std::cout << "J(f_hat) = " << num(r.eval.J) << ", defect = " << num(r.eval.defect) << ", best restart "
            << r.best_restart << " of " << r.restarts.size() << " -> " << dir.string() << "\n";
  return 0;
}

int run_derivative(const RunConfig& c) {
  const DomainMesh mesh = io::read_mesh(c.mesh_path);
  const LoadField f = load_or_unit(c, mesh);
  const TangentField v = TangentField::parse(c.field, mesh.total_boundary_length());
  DerivativeConfig dc;
  dc.solve = c.solve;
  dc.fd_t = c.t;
  dc.collar_fraction = c.collar;
  const DerivativeReport r = derivative_report(mesh, f, v, dc);

  Json j = header(c, &mesh);
  j["field"] = r.field;
  j["J"] = r.J;
  j["estimates"] = {{"volume", r.d_volume}, {"surfdiv", r.d_surfdiv}, {"bvjump", r.d_bvjump}, {"findiff", r.d_findiff}};
  Json disc = Json::array();
  for (const auto& d : r.discrepancies()) disc.push_back({{"a", d.a}, {"b", d.b}, {"relative", d.value}});
  j["discrepancies"] = std::move(disc);
  j["max_discrepancy"] = r.max_discrepancy();
  j["analytic_extension"] = r.analytic_extension;

  const fs::path out = output_path(c, "derivative.json");
  write_json(out, j);
  std::string csv = io::echo_comments(csv_echo(c, &mesh));
  csv += "estimate,value\n";
  csv += "volume," + io::format_double(r.d_volume) + "\n";
  csv += "surfdiv," + io::format_double(r.d_surfdiv) + "\n";
  csv += "bvjump," + io::format_double(r.d_bvjump) + "\n";
  csv += "findiff," + io::format_double(r.d_findiff) + "\n";
  fs::path csv_path = out;
  csv_path.replace_extension(".csv");
  io::write_atomic(csv_path, csv);
  std::cout << "I'(0): volume " << num(r.d_volume) << ", surfdiv " << num(r.d_surfdiv) << ", bvjump "
            << num(r.d_bvjump) << ", findiff " << num(r.d_findiff) << "; max rel discrepancy "
            << num(r.max_discrepancy()) << " -> " << out.string() << "\n";
  return 0;
}

int run_suite(const RunConfig& c) {
  const auto results = acceptance::run(c.criteria, &std::cout);
  Json j = header(c, nullptr);
  Json rows = Json::array();
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                    {"seconds", r.seconds}, {"budget_seconds", r.budget_seconds}});
  }
  j["criteria"] = std::move(rows);
  j["failed"] = failed;
  const fs::path dir = c.out.empty() ? output_dir() : fs::path(c.out);
  write_json(dir / "acceptance.json", j);
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  if (failed > 0) {
    throw Error(ErrorCode::acceptance_failure, std::to_string(failed) + " acceptance criteria failed");
  }
  return 0;
}

}  // namespace

void RunConfig::validate() const {
  static const char* commands[] = {"mesh", "solve", "optimize", "derivative", "suite"};
  if (std::find(std::begin(commands), std::end(commands), command) == std::end(commands)) {
    invalid("command: unknown '" + command + "' (expected mesh|solve|optimize|derivative|suite)");
  }
  if (!(solve.p >= kMinExponent && solve.p <= kMaxExponent)) {
    invalid("p: " + num(solve.p) + " outside [" + num(kMinExponent) + ", " + num(kMaxExponent) + "]");
  }
  if (command == "mesh") {
    if (shape != "disk" && shape != "square") invalid("shape: expected disk or square, got '" + shape + "'");
    if (n < (shape == "disk" ? 8 : 2)) invalid("n: too small for a " + shape + " mesh");
    if (n_radial < 0) invalid("n_radial: must be >= 0");
    if (!(size > 0.0)) invalid("size: must be positive");
  }
  if (needs_mesh(command)) {
    if (mesh_path.empty()) throw Error(ErrorCode::config_missing_key, "mesh: required for " + command);
    require_file(mesh_path, "mesh");
    if (!load_path.empty()) require_file(load_path, "load");
  }
  if (command == "optimize") {
    if (restarts < 0) invalid("restarts: must be >= 0");
    if (max_outer_iters < 1) invalid("max_outer_iters: must be >= 1");
    if (!(j_tol > 0.0)) invalid("j_tol: must be positive");
    if (neighbour_budget < 0) invalid("neighbour_budget: must be >= 0");
  }
  if (command == "derivative") {
    if (!(t > 0.0)) invalid("t: must be positive");
    if (!(collar > 0.0 && collar <= 1.0)) invalid("collar: must lie in (0, 1]");
    // Syntax only; bump widths are checked against the boundary length at run time.
    TangentField::parse(field, 1e300);
  }
  if (command == "suite") {
    if (suite != "acceptance") invalid("suite: unknown '" + suite + "' (expected acceptance)");
    for (int id : criteria) {
      if (id < 1 || id > static_cast<int>(acceptance::criteria().size())) {
        invalid("criteria: no criterion " + std::to_string(id));
      }
    }
  }
  try {
    solve.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
}

io::Echo RunConfig::echo() const {
  io::Echo e = {{"command", command}};
  if (command == "mesh") {
    e.insert(e.end(), {{"shape", shape}, {"n", std::to_string(n)}, {"n_radial", std::to_string(n_radial)},
                       {"size", num(size)}});
  } else if (command == "suite") {
    e.insert(e.end(), {{"suite", suite}, {"criteria", join(criteria)}});
  } else {
    e.insert(e.end(), {{"mesh", mesh_path},
                       {"load", load_path},
                       {"p", num(solve.p)},
                       {"eps_initial", num(solve.eps_initial)},
                       {"eps_final", num(solve.eps_final)},
                       {"eps_factor", num(solve.eps_factor)},
                       {"newton_tol", num(solve.newton_tol)},
                       {"max_newton_iters", std::to_string(solve.max_newton_iters)}});
    if (command == "optimize") {
      e.insert(e.end(), {{"restarts", std::to_string(restarts)},
                         {"max_outer_iters", std::to_string(max_outer_iters)},
                         {"j_tol", num(j_tol)},
                         {"neighbour_budget", std::to_string(neighbour_budget)}});
    }
    if (command == "derivative") {
      e.insert(e.end(), {{"field", field}, {"t", num(t)}, {"collar", num(collar)}});
    }
  }
  e.emplace_back("seed", std::to_string(seed));
  return e;
}

OptimizeConfig RunConfig::optimize_config() const {
  OptimizeConfig o;
  o.max_outer_iters = max_outer_iters;
  o.J_tol = j_tol;
  o.n_restarts = restarts;
  o.seed = seed;
  o.neighbour_budget = neighbour_budget;
  o.solve = solve;
  return o;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config_parse, where + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::config_unknown_key, where + ": unknown key '" + key + "'");
    if (auto [prev, fresh] = seen.emplace(key, number); !fresh) {
      throw Error(ErrorCode::config_parse,
                  where + ": key '" + key + "' repeated (first on line " + std::to_string(prev->second) + ")");
    }
    it->second(c, value, where + ": " + key);
  }
  c.validate();
  return c;
}

RunConfig parse_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::io_read, "config: " + std::string(e.what()));
  }
  return parse_config_text(text, path.string());
}

int run(const RunConfig& config) {
  config.validate();
  if (config.command == "mesh") return run_mesh(config);
  if (config.command == "solve") return run_solve(config);
  if (config.command == "optimize") return run_optimize(config);
  if (config.command == "derivative") return run_derivative(config);
  return run_suite(config);
}

int main(int argc, const char* const* argv) {
  CLI::App app{"p-Laplacian boundary load optimization and load-derivative studies", "plap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));
  RunConfig c;
  std::string config_path;

  auto* mesh = app.add_subcommand("mesh", "generate a disk or square mesh");
  mesh->add_option("--shape", c.shape, "disk or square");
  mesh->add_option("--n", c.n, "boundary cells (disk) or cells per side (square)");
  mesh->add_option("--n-radial", c.n_radial, "disk rings (0: default)");
  mesh->add_option("--size", c.size, "disk radius or square side");
  mesh->add_option("--out", c.out, "output mesh file");

  auto add_common = [&](CLI::App* sub, const char* load_flag) {
    sub->add_option("--mesh", c.mesh_path, "mesh file");
    sub->add_option(load_flag, c.load_path, "load file, one value per boundary cell (default: f = 1)");
    sub->add_option("--p", c.solve.p, "exponent in [1.1, 10]");
    sub->add_option("--eps-final", c.solve.eps_final, "final regularization");
    sub->add_option("--eps-initial", c.solve.eps_initial, "initial regularization");
    sub->add_option("--newton-tol", c.solve.newton_tol, "Newton residual tolerance");
    sub->add_option("--seed", c.seed, "seed, recorded in every output");
  };
  auto* solve_cmd = app.add_subcommand("solve", "solve the boundary value problem for one load");
  add_common(solve_cmd, "--load");
  solve_cmd->add_option("--out", c.out, "report file (JSON)");

  auto* opt = app.add_subcommand("optimize", "maximize J over the rearrangements of a load");
  add_common(opt, "--load0");
  opt->add_option("--restarts", c.restarts, "random restarts in addition to load0");
  opt->add_option("--max-iters", c.max_outer_iters, "outer iterations per restart");
  opt->add_option("--j-tol", c.j_tol, "relative improvement stop");
  opt->add_option("--neighbour-budget", c.neighbour_budget, "neighbours tried at each fixed point");
  opt->add_option("--out", c.out, "output directory");

  auto* der = app.add_subcommand("derivative", "four estimates of the load derivative I'(0)");
  add_common(der, "--load");
  der->add_option("--field", c.field, "constant[:c] | sin:k | cos:k | bump:center,width");
  der->add_option("--t", c.t, "finite-difference step");
  der->add_option("--collar", c.collar, "extension collar as a fraction of the radius");
  der->add_option("--out", c.out, "report file (JSON); a CSV is written next to it");

  auto* suite = app.add_subcommand("suite", "run a verification suite");
  suite->add_option("name", c.suite, "suite name (acceptance)");
  suite->add_option("--criteria", c.criteria, "subset of criterion ids")->delimiter(',');
  suite->add_option("--out", c.out, "output directory");

  auto* runcfg = app.add_subcommand("run", "run a key = value config file");
  runcfg->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[" << error_code_name(ErrorCode::config_parse) << "]: " << e.what() << "\n";
    return exit_status(ErrorCode::config_parse);
  }

  try {
    if (runcfg->parsed()) {
      c = parse_config(config_path);
    } else {
      c.command = app.get_subcommands().front()->get_name();
    }
    return run(c);
  } catch (const Error& e) {
    std::cerr << "error[" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace plap::cli
