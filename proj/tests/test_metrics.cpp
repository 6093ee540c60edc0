#include "dmri/error.hpp"
#include "dmri/metrics.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace dmri;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::string> split(std::string const &s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

TEST_CASE("psnr", "[metrics]")
{
  auto const x = oracle::random_sequence({2, 8, 8}, 1);
  CHECK(psnr(x, x) == std::numeric_limits<double>::infinity());
  CHECK(psnr(x, x, PeakMode::Fixed255) == std::numeric_limits<double>::infinity());

  SECTION("fixed peak of 255")
  {
    // After rescaling 1 -> 255, the error is one grey level everywhere: MSE = 1.
    auto const ref = DynamicSequence::constant({1, 4, 4}, Cx{1, 0});
    auto const est = DynamicSequence::constant({1, 4, 4}, Cx{254.0 / 255.0, 0});
    CHECK_THAT(psnr(ref, est, PeakMode::Fixed255), WithinAbs(48.1308, 1e-4));
    CHECK_THAT(psnr(ref * 3.0, est * 3.0, PeakMode::Fixed255), WithinAbs(48.1308, 1e-4));
  }
  SECTION("reference peak")
  {
    auto const ref = DynamicSequence::constant({1, 4, 4}, Cx{1, 0});
    auto const est = DynamicSequence::constant({1, 4, 4}, Cx{0.9, 0});
    CHECK_THAT(psnr(ref, est), WithinAbs(20.0, 1e-10));
  }
  SECTION("compares magnitudes")
  {
    auto const ref = DynamicSequence::constant({1, 2, 2}, Cx{0, 1});
    auto const est = DynamicSequence::constant({1, 2, 2}, Cx{-1, 0});
    CHECK(psnr(ref, est) == std::numeric_limits<double>::infinity());
  }
  CHECK_THROWS_AS(psnr(x, oracle::random_sequence({2, 8, 7}, 2)), DimensionError);
}

TEST_CASE("rmse", "[metrics]")
{
  auto const ref = DynamicSequence({1, 2, 2}, {1, 1, 1, 1});
  auto const est = DynamicSequence({1, 2, 2}, {0, 1, 1, 1});
  CHECK_THAT(rmse(ref, est), WithinAbs(0.5, 1e-15));
  CHECK(rmse(ref, ref) == 0.0);

  SECTION("symmetric when both share the scale")
  {
    auto const a = oracle::random_sequence({3, 5, 5}, 3);
    auto const b = oracle::random_sequence({3, 5, 5}, 4);
    RmseOptions const fixed{.averaging = RmseAveraging::PerFrame, .scale = 1.0};
    CHECK(rmse(a, b, fixed) == rmse(b, a, fixed));
  }
  SECTION("per-frame average against global")
  {
    // Frame 0 exact, frame 1 off by 1 everywhere.
    auto const r = DynamicSequence::constant({2, 2, 2}, Cx{1, 0});
    auto const e = DynamicSequence({2, 2, 2}, {1, 1, 1, 1, 0, 0, 0, 0});
    CHECK_THAT(rmse(r, e), WithinAbs(0.5, 1e-15));
    CHECK_THAT(rmse(r, e, {.averaging = RmseAveraging::Global}), WithinAbs(std::sqrt(0.5), 1e-15));
  }
  SECTION("psnr and global rmse agree")
  {
    auto const a = oracle::random_sequence({2, 6, 6}, 5);
    auto const b = a + oracle::random_sequence({2, 6, 6}, 6) * 0.1;
    double const global = rmse(a, b, {.averaging = RmseAveraging::Global});
    CHECK_THAT(psnr(a, b), WithinRel(-20.0 * std::log10(global), 1e-12));
  }
  SECTION("monotone in the perturbation size")
  {
    auto const a = oracle::random_sequence({2, 6, 6}, 7);
    auto const d = oracle::random_sequence({2, 6, 6}, 8);
    double last_psnr = std::numeric_limits<double>::infinity();
    double last_rmse = 0.0;
    for (double alpha : {0.01, 0.05, 0.1, 0.3, 1.0}) {
      auto const b = a + d * alpha;
      CHECK(psnr(a, b) < last_psnr);
      CHECK(rmse(a, b) > last_rmse);
      last_psnr = psnr(a, b);
      last_rmse = rmse(a, b);
    }
  }
}

TEST_CASE("metric series", "[metrics]")
{
  MetricSeries s("psnr_db");
  s.push(1, 20.0);
  s.push(2, std::numeric_limits<double>::infinity());
  CHECK(s.size() == 2);
  CHECK_THROWS_AS(s.push(2, 1.0), ValidationError);
  CHECK_THROWS_AS(s.push(3, std::nan("")), ValidationError);
  CHECK_THROWS_AS(s.push(3, -std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("series csv", "[metrics][io]")
{
  MetricSeries a("relative_error");
  MetricSeries b("psnr_db");
  a.push(1, 0.1);
  a.push(2, 1.0 / 3.0);
  b.push(1, 25.5);
  b.push(2, std::numeric_limits<double>::infinity());
  std::vector<MetricSeries> const both{a, b};
  auto const csv = series_to_csv(both);

  auto lines = split(csv, '\n');
  REQUIRE(lines.back().empty());
  lines.pop_back();
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "index,relative_error,psnr_db");
  CHECK(lines[2] == "2,0.33333333333333331,inf");

  // Values survive a text round trip exactly.
  auto const row = split(lines[2], ',');
  CHECK(std::stod(row[1]) == 1.0 / 3.0);
  CHECK(std::stod(row[2]) == std::numeric_limits<double>::infinity());
  CHECK(std::stod(split(lines[1], ',')[1]) == 0.1);

  SECTION("missing points leave blanks")
  {
    MetricSeries c("rmse");
    c.push(2, 0.5);
    c.push(3, 0.25);
    std::vector<MetricSeries> const mixed{a, c};
    CHECK(series_to_csv(mixed) == "index,relative_error,rmse\n1,0.10000000000000001,\n2,0.33333333333333331,0.5\n3,,0.25\n");
  }
  CHECK_THROWS_AS(series_to_csv({}), EmptyInputError);
}

TEST_CASE("psnr/rmse sweep", "[metrics]")
{
  auto const ref = oracle::random_sequence({2, 6, 6}, 9);
  auto const noise = oracle::random_sequence({2, 6, 6}, 10);
  std::vector<DynamicSequence> recon;
  for (double alpha : {0.5, 0.2, 0.05}) {
    recon.push_back(ref + noise * alpha);
  }
  std::vector<SweepEntry> entries{{0.2, recon[0], ref}, {0.3, recon[1], ref}, {0.5, recon[2], ref}};
  auto const [p, r] = psnr_rmse_sweep(entries);
  CHECK(p.label() == "psnr_db");
  CHECK(r.label() == "rmse");
  REQUIRE(p.size() == 3);
  CHECK(p.points()[0].first == 0.2);
  CHECK(p.points()[2].first == 0.5);
  CHECK(p.points()[0].second < p.points()[1].second);
  CHECK(p.points()[1].second < p.points()[2].second);
  CHECK(r.points()[0].second > r.points()[2].second);
  CHECK(p.points()[1].second == psnr(ref, recon[1]));

  std::vector<SweepEntry> unordered{{0.3, recon[0], ref}, {0.2, recon[1], ref}};
  CHECK_THROWS_AS(psnr_rmse_sweep(unordered), ValidationError);
  CHECK_THROWS_AS(psnr_rmse_sweep({}), EmptyInputError);
}
