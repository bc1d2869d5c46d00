#include "bsvem/error.hpp"
#include "bsvem/mesh.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace bsvem::mesh {

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : text_(text) {}

  std::string_view next() {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of file", line_ + 1);
    const std::size_t end = text_.find('\n', pos_);
    std::string_view s(text_.data() + pos_, (end == std::string::npos ? text_.size() : end) - pos_);
    pos_ = end == std::string::npos ? text_.size() : end + 1;
    ++line_;
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  }

  std::size_t line() const { return line_; }
  bool done() const {
    for (std::size_t k = pos_; k < text_.size(); ++k)
      if (text_[k] != '\n' && text_[k] != ' ' && text_[k] != '\r') return false;
    return true;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

template <class T>
std::vector<T> parse_numbers(std::string_view s, std::size_t line) {
  std::vector<T> out;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p == end) break;
    T v{};
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc() || (res.ptr < end && *res.ptr != ' ' && *res.ptr != '\t'))
      throw ParseError("malformed number in '" + std::string(s) + "'", line);
    out.push_back(v);
    p = res.ptr;
  }
  return out;
}

}  // namespace

std::string to_string(const BulkSurfaceMesh& mesh) {
  std::string out = "bsmesh 1\n";
  out += std::to_string(mesh.num_nodes()) + " " + std::to_string(mesh.num_boundary_nodes) + " " +
         std::to_string(mesh.num_elements()) + "\n";
  for (const Point& p : mesh.nodes) {
    append_double(out, p.x());
    out += ' ';
    append_double(out, p.y());
    out += '\n';
  }
  for (const auto& el : mesh.elements) {
    out += std::to_string(el.size());
    for (Index v : el) out += " " + std::to_string(v);
    out += '\n';
  }
  return out;
}

template <class T>
std::vector<T> parse_line(LineReader& in) {
  const auto s = in.next();
  return parse_numbers<T>(s, in.line());
}

BulkSurfaceMesh parse_mesh(const std::string& text) {
  LineReader in(text);
  if (in.next() != "bsmesh 1") throw ParseError("expected header 'bsmesh 1'", in.line());
  const auto counts = parse_line<long>(in);
  if (counts.size() != 3 || counts[0] < 0 || counts[1] < 0 || counts[2] < 0 || counts[1] > counts[0])
    throw ParseError("expected '<N> <M> <num_elements>'", in.line());
  const Index n = static_cast<Index>(counts[0]), nb = static_cast<Index>(counts[1]);
  const Index ne = static_cast<Index>(counts[2]);
  std::vector<Point> nodes;
  nodes.reserve(n);
  for (Index i = 0; i < n; ++i) {
    const auto xy = parse_line<double>(in);
    if (xy.size() != 2) throw ParseError("expected 'x y'", in.line());
    nodes.emplace_back(xy[0], xy[1]);
  }
  std::vector<std::vector<Index>> elements;
  elements.reserve(ne);
  for (Index e = 0; e < ne; ++e) {
    const auto v = parse_line<long>(in);
    if (v.empty() || v[0] < 3 || static_cast<long>(v.size()) != v[0] + 1)
      throw ParseError("expected '<arity> i0 ... i{arity-1}' with arity >= 3", in.line());
    std::vector<Index> el;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k] < 0 || v[k] >= n) throw ParseError("node index out of range", in.line());
      el.push_back(static_cast<Index>(v[k]));
    }
    elements.push_back(std::move(el));
  }
  if (!in.done()) throw ParseError("trailing content after the last element", in.line() + 1);

  BulkSurfaceMesh m;
  try {
    m = build_mesh(nodes, elements);
  } catch (const MeshGenerationError& e) {
    throw FormatError(std::string("invalid mesh topology: ") + e.what());
  }
  // The file must already be in boundary-first cycle order.
  if (m.num_boundary_nodes != nb || m.nodes != nodes || m.elements != elements) {
    std::ostringstream os;
    os << "node ordering violates boundary-first layout (file declares M = " << nb << ", topology has "
       << m.num_boundary_nodes << " boundary nodes in a different order)";
    throw FormatError(os.str());
  }
  return m;
}

void save_mesh(const BulkSurfaceMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_string(mesh);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

BulkSurfaceMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str());
}

}  // namespace bsvem::mesh
