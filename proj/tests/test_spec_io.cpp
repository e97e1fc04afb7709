#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "heisqi/spec_io.hpp"
#include "test_util.hpp"

using namespace heisqi;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Error error_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return Error(ErrorKind::InvalidArgument, "");
}

}  // namespace

TEST(SpecIo, MatrixRoundTrip) {
  const SpecFile f = parse_spec(R"({"n": 1, "label": "x", "derivation": {"matrix": [[1,0,0],[-1,2,0],[0,0,3]]}})");
  EXPECT_EQ(f.spec.n(), 1);
  EXPECT_EQ(*f.label, "x");
  ASSERT_FALSE(f.spec.is_spectral());
  EXPECT_EQ(f.spec.matrix_form()(1, 0), -1.0);
  const std::string text = serialize_spec(f);
  const SpecFile g = parse_spec(text);
  EXPECT_EQ(g.spec.matrix_form(), f.spec.matrix_form());
  EXPECT_EQ(serialize_spec(g), text);
}

TEST(SpecIo, SpectralRoundTrip) {
  const SpecFile f = parse_spec(read_file(heisqi::testing::samples_path("spectral123.json")));
  ASSERT_TRUE(f.spec.is_spectral());
  EXPECT_EQ(f.spec.spectral_form().size(), 3u);
  const std::string text = serialize_spec(f);
  EXPECT_EQ(serialize_spec(parse_spec(text)), text);
  EXPECT_EQ(f.spec.matrix(), parse_spec(read_file(heisqi::testing::samples_path("diag123.json"))).spec.matrix());
}

TEST(SpecIo, SamplesParseAndDecompose) {
  for (const char* name : {"diag123.json", "diag246.json", "diag134.json", "diag112.json", "diag13224.json",
                           "conjugate123.json", "spectral123.json"}) {
    const SpecFile f = parse_spec(read_file(heisqi::testing::samples_path(name)));
    EXPECT_TRUE(f.label.has_value()) << name;
    EXPECT_NO_THROW(decompose(f.spec)) << name;
  }
}

TEST(SpecIo, ErrorsNameTheField) {
  struct Case {
    const char* text;
    ErrorKind kind;
    const char* field;
  };
  const std::vector<Case> cases = {
      {R"({"derivation": {"matrix": [[1,0,0],[0,2,0],[0,0,3]]}})", ErrorKind::SchemaError, "n"},
      {R"({"n": 0, "derivation": {"matrix": []}})", ErrorKind::SchemaError, "n"},
      {R"({"n": 1.5, "derivation": {"matrix": []}})", ErrorKind::SchemaError, "n"},
      {R"({"n": "1", "derivation": {"matrix": []}})", ErrorKind::SchemaError, "n"},
      {R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2,0],[0,0,3]]}, "extra": 1})", ErrorKind::SchemaError, "extra"},
      {R"({"n": 1, "label": 3, "derivation": {"matrix": [[1,0,0],[0,2,0],[0,0,3]]}})", ErrorKind::SchemaError, "label"},
      {R"({"n": 1})", ErrorKind::SchemaError, "derivation"},
      {R"({"n": 1, "derivation": {}})", ErrorKind::SchemaError, "derivation"},
      {R"({"n": 1, "derivation": {"matrix": [], "spectral": []}})", ErrorKind::SchemaError, "derivation"},
      {R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2,0]]}})", ErrorKind::DimensionError, "derivation.matrix"},
      {R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2],[0,0,3]]}})", ErrorKind::DimensionError,
       "derivation.matrix[1]"},
      {R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2,"a"],[0,0,3]]}})", ErrorKind::SchemaError,
       "derivation.matrix[1][2]"},
      {R"({"n": 1, "derivation": {"spectral": [{"eigenvalue": 1}]}})", ErrorKind::SchemaError,
       "derivation.spectral[0].eigenvectors"},
      {R"({"n": 1, "derivation": {"spectral": [{"eigenvalue": 1, "eigenvectors": [[1,0,0]]}, {"eigenvalue": 2, "eigenvectors": [[0,1]]}]}})",
       ErrorKind::DimensionError, "derivation.spectral[1].eigenvectors[0]"},
      {R"({"n": 1, "derivation": {"spectral": [{"eigenvalue": 1, "vectors": []}]}})", ErrorKind::SchemaError,
       "derivation.spectral[0].vectors"},
      {R"([1, 2])", ErrorKind::SchemaError, "(root)"},
      {R"({"n": 1, "derivation": )", ErrorKind::SyntaxError, "(root)"},
  };
  for (const auto& c : cases) {
    const Error e = error_of(c.text);
    EXPECT_EQ(e.kind(), c.kind) << c.text;
    EXPECT_EQ(e.field(), c.field) << c.text;
  }
}

TEST(SpecIo, ParsedSpecFeedsValidation) {
  // Well-formed file, but not a derivation: parsing succeeds and decomposition rejects it.
  const SpecFile f = parse_spec(R"({"n": 1, "derivation": {"matrix": [[1,0,0],[0,2,0],[0,0,4]]}})");
  try {
    decompose(f.spec);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotADerivation);
  }
}
