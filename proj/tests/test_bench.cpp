#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "semlab/bench.hpp"

namespace semlab {
namespace {

SweepOptions small_sweep() {
  SweepOptions o;
  o.degrees = {3};
  o.elements = {1, 8, 27};
  o.reps = 3;
  return o;
}

TEST(Sweep, RecordsAreInternallyConsistent) {
  const auto result = run_sweep(small_sweep());
  ASSERT_TRUE(result.failures.empty());
  ASSERT_EQ(result.records.size(), 3u);
  for (const auto& r : result.records) {
    EXPECT_EQ(r.kernel, "buffered");
    EXPECT_EQ(r.degree, 3);
    EXPECT_EQ(r.reps, 3);
    EXPECT_EQ(r.flops, (12 * 4 + 15) * r.elements * 64);
    EXPECT_NEAR(r.gflops * 1e9 * r.median_s, static_cast<double>(r.flops), 1e-3 * r.flops);
    EXPECT_NEAR(r.dofs_per_s, r.gflops * 1e9 / (12 * 4 + 15), 1e-3 * r.dofs_per_s);
    EXPECT_NEAR(r.gbs * 1e9 * r.median_s, 64.0 * r.elements * 64, 1e-3 * 64.0 * r.elements * 64);
    EXPECT_LE(r.min_s, r.median_s);
    EXPECT_GE(r.rel_stddev, 0.0);
    EXPECT_GT(r.checksum, 0.0);
  }
}

TEST(Sweep, SeedMakesChecksumsReproducible) {
  const auto a = run_sweep(small_sweep());
  const auto b = run_sweep(small_sweep());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    EXPECT_EQ(a.records[i].checksum, b.records[i].checksum);
  auto other = small_sweep();
  other.seed = 7;
  EXPECT_NE(run_sweep(other).records[0].checksum, a.records[0].checksum);
}

TEST(Sweep, DegreeSevenLargeCount) {
  SweepOptions o;
  o.kernel = KernelVariant::unrolled(8);
  o.degrees = {7};
  o.elements = {4096};
  o.reps = 3;
  const auto result = run_sweep(o);
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].flops, 111LL * 4096 * 512);
}

TEST(Sweep, IllegalVariantIsAPerConfigurationFailure) {
  SweepOptions o;
  o.kernel = KernelVariant::unrolled(4);
  o.degrees = {3, 4};
  o.elements = {1};
  o.reps = 3;
  const auto result = run_sweep(o);
  EXPECT_EQ(result.records.size(), 1u);
  ASSERT_EQ(result.failures.size(), 1u);
  EXPECT_EQ(result.failures[0].degree, 4);
}

TEST(Sweep, RejectsBadOptions) {
  auto o = small_sweep();
  o.reps = 2;
  EXPECT_THROW(run_sweep(o), std::invalid_argument);
  o = small_sweep();
  o.elements = {0};
  EXPECT_THROW(run_sweep(o), std::invalid_argument);
  o = small_sweep();
  o.degrees = {};
  EXPECT_THROW(run_sweep(o), std::invalid_argument);
}

BenchRecord sample(int degree, std::int64_t e, double gf) {
  BenchRecord r;
  r.kernel = "unroll4";
  r.degree = degree;
  r.elements = e;
  r.reps = 10;
  r.threads = 4;
  r.median_s = 0.1 / 3.0;
  r.min_s = 1e-7 / 7.0;
  r.rel_stddev = 0.0123456789012345;
  r.flops = 123456789012;
  r.gflops = gf;
  r.dofs_per_s = 1.0 / 3.0 * 1e9;
  r.gbs = std::sqrt(2.0);
  r.checksum = 12345.678901234567;
  return r;
}

TEST(Serialization, CsvRoundTripIsLossless) {
  const std::vector<BenchRecord> recs{sample(7, 64, 1.5), sample(11, 4096, M_PI)};
  const auto back = records_from_csv(records_to_csv(recs));
  EXPECT_EQ(back, recs);
  EXPECT_THROW(records_from_csv("bad,header\n"), std::invalid_argument);
  EXPECT_THROW(records_from_csv(records_to_csv(recs) + "x,1\n"), std::invalid_argument);
}

TEST(Serialization, JsonRoundTripIsLossless) {
  const std::vector<BenchRecord> recs{sample(7, 64, 1.5), sample(3, 1, 1e-3)};
  const auto text = records_to_json(recs).dump();
  EXPECT_EQ(records_from_json(nlohmann::json::parse(text)), recs);
}

TEST(PlotData, SeriesAndBars) {
  const std::vector<BenchRecord> recs{sample(7, 64, 1.0), sample(7, 4096, 2.0),
                                      sample(11, 4096, 3.0), sample(11, 8, 0.5)};
  const auto plot = reshape_for_plot(recs, 4096);
  ASSERT_EQ(plot.series.size(), 2u);
  EXPECT_EQ(plot.series[0].degree, 7);
  EXPECT_EQ(plot.series[1].points.front(), (std::pair<std::int64_t, double>{8, 0.5}));
  ASSERT_EQ(plot.bars.size(), 2u);
  EXPECT_EQ(plot.bars[1].gflops, 3.0);

  const auto j = plot_to_json(plot);
  EXPECT_EQ(j.at("bar_elements"), 4096);
  EXPECT_EQ(j.at("series").size(), 2u);
  const auto csv = plot_to_csv(plot);
  EXPECT_EQ(csv.rfind("chart,kernel,degree,elements,gflops\n", 0), 0u);
  EXPECT_NE(csv.find("bar,unroll4,11,4096,3\n"), std::string::npos);
}

}  // namespace
}  // namespace semlab
