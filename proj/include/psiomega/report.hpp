#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psiomega/mesh.hpp"

namespace psiomega {

/// Shortest decimal that round-trips, "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// Legacy ASCII VTK unstructured grid with one scalar point-data array.
void write_vtk(const std::filesystem::path& path, const TriangleMesh& mesh, std::span<const double> values,
               std::string_view name);

/// Comma-separated file with a header row; LF line endings.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace psiomega
