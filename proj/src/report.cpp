#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "psiomega/report.hpp"

namespace psiomega {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_vtk(const std::filesystem::path& path, const TriangleMesh& mesh, std::span<const double> values,
               std::string_view name) {
  if (values.size() != static_cast<std::size_t>(mesh.vertex_count())) {
    throw std::invalid_argument("field does not match mesh");
  }
  std::ofstream out = open_output(path);
  out << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (const Point& p : mesh.vertices()) out << format_number(p.x) << ' ' << format_number(p.y) << " 0\n";
  out << "CELLS " << mesh.triangle_count() << ' ' << 4 * static_cast<long long>(mesh.triangle_count()) << '\n';
  for (const Triangle& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.triangle_count() << '\n';
  for (Index t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.vertex_count() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : values) out << format_number(v) << '\n';
}

void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows) {
  std::ofstream out = open_output(path);
  const auto line = [&out](std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw std::invalid_argument("CSV row width does not match header");
    line(r);
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out = open_output(path);
  out << text;
}

}  // namespace psiomega
