#include "bsvem/error.hpp"
#include "bsvem/mesh.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace bsvem;
using namespace bsvem::mesh;

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "bsvem_mesh_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(MeshIo, RoundTripIsBitExact) {
  for (double h : {0.5, 0.125, 0.03125}) {
    const auto m = generate_cartesian_cut(geometry::unit_disc(), h);
    const auto path = temp_file("roundtrip.bsm");
    save_mesh(m, path);
    const auto back = load_mesh(path);
    EXPECT_TRUE(back == m);
  }
}

TEST(MeshIo, TriangulationLoadsAndValidates) {
  const auto m = structured_disc_triangulation(4);
  const auto back = parse_mesh(to_string(m));
  EXPECT_TRUE(back == m);
  EXPECT_TRUE(validate_mesh(back, geometry::unit_disc(), 0.2, 0.2).passed);
}

TEST(MeshIo, Header) {
  const auto text = to_string(build_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}));
  EXPECT_EQ(text.rfind("bsmesh 1\n3 3 1\n", 0), 0u);
}

TEST(MeshIo, BoundaryNodeAfterInteriorIsFormatError) {
  // Node 0 is the interior centre; boundary nodes must come first.
  const std::string text =
      "bsmesh 1\n5 4 4\n0.5 0.5\n0 0\n1 0\n1 1\n0 1\n3 0 1 2\n3 0 2 3\n3 0 3 4\n3 0 4 1\n";
  EXPECT_THROW(parse_mesh(text), FormatError);
}

TEST(MeshIo, WrongBoundaryCountIsFormatError) {
  const std::string text = "bsmesh 1\n3 2 1\n0 0\n1 0\n0 1\n3 0 1 2\n";
  EXPECT_THROW(parse_mesh(text), FormatError);
}

TEST(MeshIo, MalformedLineReportsLineNumber) {
  const std::string text = "bsmesh 1\n3 3 1\n0 0\n1 oops\n0 1\n3 0 1 2\n";
  try {
    parse_mesh(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(MeshIo, BadMagic) { EXPECT_THROW(parse_mesh("mesh 2\n"), ParseError); }

TEST(MeshIo, IndexOutOfRange) {
  EXPECT_THROW(parse_mesh("bsmesh 1\n3 3 1\n0 0\n1 0\n0 1\n3 0 1 7\n"), ParseError);
}

TEST(MeshIo, MissingFile) { EXPECT_THROW(load_mesh("/nonexistent/dir/mesh.bsm"), IoError); }
