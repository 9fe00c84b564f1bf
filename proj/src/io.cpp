#include "plap/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "plap/error.hpp"

namespace plap::io {

namespace {

struct Line {
  int number;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Non-empty, non-comment lines with their 1-based line numbers.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    ++number;
    const auto line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') out.push_back({number, line});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

[[noreturn]] void fail(ErrorCode code, const std::string& source, int line, const std::string& what) {
  throw Error(code, source + ":" + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(std::string_view tok, ErrorCode code, const std::string& source, int line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(code, source, line, "expected a number, got '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string format_mesh(const DomainMesh& mesh) {
  std::string out = "MESH2D " + std::to_string(mesh.num_vertices()) + " " + std::to_string(mesh.num_triangles()) +
                    " " + std::to_string(mesh.num_boundary_cells()) + "\n";
  for (const auto& v : mesh.vertices()) out += format_double(v.x()) + " " + format_double(v.y()) + "\n";
  for (const auto& t : mesh.triangles()) {
    out += std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  const auto& loop = mesh.boundary_loop();
  for (std::size_t k = 0; k < loop.size(); ++k) out += (k ? " " : "") + std::to_string(loop[k]);
  out += "\n";
  return out;
}

std::string mesh_hash(const DomainMesh& mesh) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(format_mesh(mesh))));
  return buf;
}

std::string echo_comments(const Echo& echo) {
  std::string out;
  for (const auto& [k, v] : echo) out += "# " + k + "=" + v + "\n";
  return out;
}

DomainMesh parse_mesh(std::string_view text, const std::string& source) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::mesh_invalid, source + ": empty mesh file");
  const auto head = split_ws(lines[0].text);
  if (head.size() != 4 || head[0] != "MESH2D") {
    fail(ErrorCode::mesh_invalid, source, lines[0].number,
         "expected header 'MESH2D <n_vertices> <n_triangles> <n_boundary_cells>'");
  }
  const auto code = ErrorCode::mesh_invalid;
  const auto nv = parse_number<std::size_t>(head[1], code, source, lines[0].number);
  const auto nt = parse_number<std::size_t>(head[2], code, source, lines[0].number);
  const auto nb = parse_number<std::size_t>(head[3], code, source, lines[0].number);
  if (lines.size() != 1 + nv + nt + 1) {
    const int last = lines.back().number;
    fail(code, source, last,
         "expected " + std::to_string(nv + nt + 2) + " content lines, found " + std::to_string(lines.size()));
  }
  std::vector<Point> verts;
  verts.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& ln = lines[1 + i];
    const auto tok = split_ws(ln.text);
    if (tok.size() != 2) fail(code, source, ln.number, "vertex line needs 2 coordinates");
    verts.emplace_back(parse_number<double>(tok[0], code, source, ln.number),
                       parse_number<double>(tok[1], code, source, ln.number));
  }
  auto index = [&](std::string_view tok, int line) {
    const auto v = parse_number<long long>(tok, code, source, line);
    if (v < 0 || static_cast<std::size_t>(v) >= nv) {
      fail(code, source, line, "vertex index " + std::string(tok) + " out of range");
    }
    return static_cast<int>(v);
  };
  std::vector<Triangle> tris;
  tris.reserve(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const auto& ln = lines[1 + nv + i];
    const auto tok = split_ws(ln.text);
    if (tok.size() != 3) fail(code, source, ln.number, "triangle line needs 3 vertex indices");
    tris.push_back({index(tok[0], ln.number), index(tok[1], ln.number), index(tok[2], ln.number)});
  }
  const auto& ln = lines.back();
  const auto tok = split_ws(ln.text);
  if (tok.size() != nb) {
    fail(code, source, ln.number,
         "boundary loop has " + std::to_string(tok.size()) + " entries, header says " + std::to_string(nb));
  }
  std::vector<int> loop;
  loop.reserve(nb);
  for (const auto t : tok) loop.push_back(index(t, ln.number));
  DomainMesh mesh(std::move(verts), std::move(tris), std::move(loop));
  const auto report = validate_mesh(mesh);
  if (!report.ok()) throw Error(ErrorCode::mesh_invalid, source + ": " + report.summary());
  return mesh;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_read, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_read, "error reading '" + path.string() + "'");
  return ss.str();
}

DomainMesh read_mesh(const std::filesystem::path& path) { return parse_mesh(read_text(path), path.string()); }

void write_mesh(const std::filesystem::path& path, const DomainMesh& mesh, const Echo& echo) {
  Echo full = echo;
  full.emplace_back("mesh_hash", mesh_hash(mesh));
  full.emplace_back("tool_version", std::string(kToolVersion));
  write_atomic(path, format_mesh(mesh) + echo_comments(full));
}

std::vector<double> parse_load_values(std::string_view text, const std::string& source) {
  std::vector<double> out;
  for (const auto& ln : content_lines(text)) {
    const auto tok = split_ws(ln.text);
    if (tok.size() != 1) fail(ErrorCode::load_invalid, source, ln.number, "expected one value per line");
    const double v = parse_number<double>(tok[0], ErrorCode::load_invalid, source, ln.number);
    if (!std::isfinite(v)) fail(ErrorCode::load_invalid, source, ln.number, "load value is not finite");
    out.push_back(v);
  }
  return out;
}

LoadField read_load(const std::filesystem::path& path, const DomainMesh& mesh) {
  auto values = parse_load_values(read_text(path), path.string());
  if (values.size() != mesh.num_boundary_cells()) {
    throw Error(ErrorCode::mesh_mismatch, path.string() + ": " + std::to_string(values.size()) +
                                              " load values for a mesh with " +
                                              std::to_string(mesh.num_boundary_cells()) + " boundary cells");
  }
  return make_load(mesh, std::move(values));
}

void write_load(const std::filesystem::path& path, const LoadField& f, const Echo& echo) {
  std::string out;
  for (double v : f.values) out += format_double(v) + "\n";
  Echo full = echo;
  full.emplace_back("tool_version", std::string(kToolVersion));
  write_atomic(path, out + echo_comments(full));
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_write, "cannot create directory '" + dir.string() + "': " + ec.message());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_write, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::io_write, "error writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io_write, "cannot rename into '" + path.string() + "'");
  }
}

}  // namespace plap::io
