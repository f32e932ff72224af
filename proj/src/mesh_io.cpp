#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "psiomega/errors.hpp"
#include "psiomega/mesh.hpp"

namespace psiomega {

namespace {

// Yields non-comment, non-blank lines together with their 1-based number.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : in_(std::string(text)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  int number() const { return number_; }

 private:
  std::istringstream in_;
  int number_ = 0;
};

template <class... T>
void read_fields(LineReader& reader, const char* what, T&... out) {
  std::string line;
  if (!reader.next(line)) {
    throw ParseError(std::string("unexpected end of file while reading ") + what);
  }
  std::istringstream ls(line);
  (ls >> ... >> out);
  std::string trailing;
  if (ls.fail() || (ls >> trailing)) {
    throw ParseError("line " + std::to_string(reader.number()) + ": malformed " + what + ": '" +
                     line + "'");
  }
}

}  // namespace

TriangleMesh parse_mesh(std::string_view text, const LoadOptions& options) {
  LineReader reader(text);
  long long nv = 0;
  long long nt = 0;
  read_fields(reader, "header", nv, nt);
  if (nv <= 0 || nt <= 0 || nv > (1LL << 30) || nt > (1LL << 30)) {
    throw ParseError("header counts out of range");
  }
  std::vector<Point> vertices(nv);
  for (auto& p : vertices) read_fields(reader, "vertex", p.x, p.y);
  std::vector<Triangle> triangles(nt);
  for (auto& t : triangles) read_fields(reader, "triangle", t[0], t[1], t[2]);
  std::string extra;
  if (reader.next(extra)) {
    throw ParseError("line " + std::to_string(reader.number()) + ": unexpected trailing data");
  }
  MeshOptions mo;
  mo.repair_orientation = !options.strict;
  return TriangleMesh(std::move(vertices), std::move(triangles), mo);
}

TriangleMesh load_mesh(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mesh(buffer.str(), options);
}

void save_mesh(const TriangleMesh& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write mesh file " + path.string());
  out << std::setprecision(17);
  out << m.vertex_count() << ' ' << m.triangle_count() << '\n';
  for (const Point& p : m.vertices()) out << p.x << ' ' << p.y << '\n';
  for (const Triangle& t : m.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace psiomega
