#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "honeycomb/io.hpp"

using namespace honeycomb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("honeycomb_io_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(PotentialJson, RoundTrip) {
  const auto g = build_geometry(1.0);
  const auto V = atomic_lattice(g, 1.0, 0.3, 3);
  const auto W = potential_from_json(json::parse(potential_to_json(V).dump()));
  EXPECT_EQ(W.kind(), "atomic");
  EXPECT_EQ(W.coeffs(), V.coeffs());
}

TEST(PotentialJson, SchemaErrors) {
  EXPECT_THROW(potential_from_json(json::parse(R"({"entries": [[1, 0, 0.5]]})")), ConfigError);
  EXPECT_THROW(potential_from_json(json::parse(R"({"entries": [[1.5, 0, 0.5, 0]]})")), ConfigError);
  EXPECT_THROW(potential_from_json(json::parse(R"({"kind": "x"})")), ConfigError);
  EXPECT_THROW(potential_from_json(json::parse(R"({"entries": [], "extra": 1})")), ConfigError);
  EXPECT_THROW(potential_from_json(json::parse("[]")), ConfigError);
  const auto V = potential_from_json(json::parse(R"({"entries": [[1, 1, 0.5, 0], [1, 1, 0.25, 0]]})"));
  EXPECT_EQ(V.kind(), "fourier");
  EXPECT_EQ((V[{1, 1}]), cplx(0.75));
}

TEST(AtomicWrite, ReplacesFileAndLeavesNoTemporaries) {
  const auto d = scratch_dir();
  const auto p = d / "out.csv";
  write_atomic(p, "a\n");
  write_atomic(p, "b,c\n");
  EXPECT_EQ(slurp(p), "b,c\n");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++n;
  EXPECT_EQ(n, 1u);
  EXPECT_THROW(write_atomic(d / "missing" / "x.json", "{}"), std::runtime_error);
  fs::remove_all(d);
}

TEST(Reports, DiracJsonIsStable) {
  const auto g = build_geometry(1.0);
  auto r = detect_dirac(g, optical_lattice(1.0), 0.3, 5);
  fit_cone(g, optical_lattice(1.0), r, uniform_directions(2));
  const std::string a = dump(dirac_to_json(r));
  const std::string b = dump(dirac_to_json(r));
  EXPECT_EQ(a, b);
  const auto j = json::parse(a);
  EXPECT_TRUE(j["verdict"].get<bool>());
  EXPECT_EQ(j.begin().key(), "verdict");
  EXPECT_EQ(j["fits"].size(), 2u);
  EXPECT_EQ(j["bands"][0].get<int>(), 1);
}

TEST(Reports, SplitCsvLayout) {
  SplitTable t;
  t.rows.push_back({0.01, 17.5, 17.6, 1e-6, 2e-6});
  EXPECT_EQ(split_csv(t), "eps,measured_double,measured_simple,defect_double,defect_simple\n"
                          "0.01,17.5,17.6,1e-06,2e-06\n");
}

TEST(Format, Numbers) {
  EXPECT_EQ(fmt_num(0.1), "0.1");
  EXPECT_EQ(fmt_num(17.54596338), "17.54596338");
  EXPECT_EQ(fmt_num(-2.5e-12), "-2.5e-12");
}
