#include "dmri/error.hpp"
#include "dmri/sequence.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace dmri;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::filesystem::path temp_path(std::string const &name)
{
  auto dir = std::filesystem::temp_directory_path() / "dmri-test-sequence";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<char> slurp(std::filesystem::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(std::filesystem::path const &p, std::vector<char> const &bytes)
{
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("frobenius norm", "[tensor]")
{
  CHECK(frobenius_norm(DynamicSequence::zeros({2, 4, 4})) == 0.0);
  CHECK(frobenius_norm(DynamicSequence({1, 1, 2}, {Cx{3, 0}, Cx{4, 0}})) == 5.0);

  auto const x = oracle::random_sequence({2, 8, 8}, 1);
  CHECK_THAT(frobenius_norm(x), WithinRel(oracle::frobenius(x), 1e-12));
}

TEST_CASE("inner product", "[tensor]")
{
  auto const ones = DynamicSequence::constant({1, 2, 2}, Cx{1, 0});
  CHECK(inner_product(ones, ones) == Cx{4, 0});

  auto const a = DynamicSequence({1, 1, 1}, {Cx{0, 1}});
  auto const b = DynamicSequence({1, 1, 1}, {Cx{1, 0}});
  CHECK(inner_product(a, b) == Cx{0, -1});

  auto const x = oracle::random_sequence({2, 6, 6}, 2);
  auto const y = oracle::random_sequence({2, 6, 6}, 3);
  auto const expected = oracle::inner(x, y);
  CHECK(std::abs(inner_product(x, y) - expected) <= 1e-12 * std::abs(expected));

  auto const self = inner_product(x, x);
  CHECK_THAT(self.real(), WithinRel(std::pow(frobenius_norm(x), 2), 1e-12));
  CHECK(self.imag() == 0.0);

  CHECK_THROWS_AS(inner_product(x, oracle::random_sequence({2, 6, 5}, 4)), DimensionError);
}

TEST_CASE("norm inequalities on random pairs", "[tensor][property]")
{
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto const a = oracle::random_sequence({2, 5, 7}, 100 + seed);
    auto const b = oracle::random_sequence({2, 5, 7}, 200 + seed) * (0.1 + static_cast<double>(seed));
    CHECK(frobenius_norm(a + b) <= frobenius_norm(a) + frobenius_norm(b) + 1e-12);
    CHECK(std::abs(inner_product(a, b)) <= frobenius_norm(a) * frobenius_norm(b) * (1 + 1e-12));
  }
}

TEST_CASE("shape validation", "[tensor]")
{
  CHECK_THROWS_AS(DynamicSequence({0, 2, 2}, {}), DimensionError);
  CHECK_THROWS_AS(DynamicSequence({1, 2, 2}, std::vector<Cx>(3)), DimensionError);
  CHECK_THROWS_AS(DynamicSequence::zeros({1, 2, 2}) + DynamicSequence::zeros({1, 2, 3}), DimensionError);
}

TEST_CASE("casorati", "[tensor]")
{
  SECTION("column t is frame t flattened row-major")
  {
    DynamicSequence const x({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    auto const view = casorati(x);
    REQUIRE(view.matrix().rows() == 4);
    REQUIRE(view.matrix().cols() == 2);
    for (int r = 0; r < 4; ++r) {
      CHECK(view.matrix()(r, 0) == Cx(r + 1.0, 0));
      CHECK(view.matrix()(r, 1) == Cx(r + 5.0, 0));
    }
  }
  SECTION("round trip is exact")
  {
    auto const x = oracle::random_sequence({3, 4, 5}, 9);
    CHECK(casorati(x).to_sequence() == x);
  }
  SECTION("single frame gives a single column")
  {
    auto const x = oracle::random_sequence({1, 3, 4}, 10);
    auto const view = casorati(x);
    CHECK(view.matrix().rows() == 12);
    CHECK(view.matrix().cols() == 1);
  }
}

TEST_CASE("sequence file", "[tensor][io]")
{
  auto const x = oracle::random_sequence({3, 4, 5}, 11);
  auto const path = temp_path("x.dseq");
  write_sequence(x, path);

  SECTION("round trip is bit-identical")
  {
    CHECK(read_sequence(path) == x);
    auto const bytes = slurp(path);
    std::string const head(bytes.begin(), bytes.begin() + 12);
    CHECK(head == "DSEQ1\n3 4 5\n");
    CHECK(bytes.size() == 12 + 16 * x.size());
  }

  SECTION("little-endian float64 pairs")
  {
    write_sequence(DynamicSequence({1, 1, 1}, {Cx{1.0, -2.0}}), path);
    auto const bytes = slurp(path);
    std::vector<unsigned char> const payload(bytes.end() - 16, bytes.end());
    std::vector<unsigned char> const expected{0, 0, 0, 0, 0, 0, 0xf0, 0x3f, 0, 0, 0, 0, 0, 0, 0, 0xc0};
    CHECK(payload == expected);
  }

  auto expect_fault = [&](std::vector<char> const &bytes, FormatFault fault) {
    auto const bad = temp_path("bad.dseq");
    spit(bad, bytes);
    try {
      read_sequence(bad);
      FAIL("expected a format error");
    } catch (FormatError const &e) {
      CHECK(e.fault() == fault);
    }
  };

  SECTION("bad magic")
  {
    auto bytes = slurp(path);
    bytes[4] = '2';
    expect_fault(bytes, FormatFault::BadMagic);
  }
  SECTION("truncated payload")
  {
    auto bytes = slurp(path);
    bytes.resize(bytes.size() - 8);
    expect_fault(bytes, FormatFault::Truncated);
  }
  SECTION("trailing bytes")
  {
    auto bytes = slurp(path);
    bytes.push_back(0);
    expect_fault(bytes, FormatFault::TrailingBytes);
  }
  SECTION("malformed headers")
  {
    for (std::string const header : {"3 4\n", "3 4 5 6\n", "3  4 5\n", "3 4 x\n", "0 4 5\n", "03 4 5\n", "3 4 5"}) {
      std::string text = "DSEQ1\n" + header;
      expect_fault(std::vector<char>(text.begin(), text.end()), FormatFault::MalformedHeader);
    }
  }
  SECTION("missing file") { CHECK_THROWS_AS(read_sequence(temp_path("missing.dseq")), IoError); }
}
