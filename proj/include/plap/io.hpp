#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plap/geometry2d.hpp"
#include "plap/load.hpp"

namespace plap::io {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Ordered key/value pairs echoed into every output.
using Echo = std::vector<std::pair<std::string, std::string>>;

std::uint64_t fnv1a64(std::string_view bytes);

/// Canonical text of the mesh (no comments), the input of mesh_hash.
std::string format_mesh(const DomainMesh& mesh);
/// 16 hex digits of FNV-1a over format_mesh.
std::string mesh_hash(const DomainMesh& mesh);

/// Text files accept '#' comment lines anywhere; writers append the echo as
/// trailing "# key=value" lines.
DomainMesh parse_mesh(std::string_view text, const std::string& source = "<string>");
DomainMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const DomainMesh& mesh, const Echo& echo = {});

std::vector<double> parse_load_values(std::string_view text, const std::string& source = "<string>");
LoadField read_load(const std::filesystem::path& path, const DomainMesh& mesh);
void write_load(const std::filesystem::path& path, const LoadField& f, const Echo& echo = {});

/// %.16e: 17 significant digits, locale independent.
std::string format_double(double x);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_text(const std::filesystem::path& path);

/// Comment block for CSV and other text outputs.
std::string echo_comments(const Echo& echo);

}  // namespace plap::io
