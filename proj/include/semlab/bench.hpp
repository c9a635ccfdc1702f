#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semlab/ax.hpp"

namespace semlab {

/// One timed (kernel, N, E) configuration. Times cover the kernel only.
struct BenchRecord {
  std::string kernel;
  int degree = 0;
  std::int64_t elements = 0;
  int reps = 0;
  int threads = 0;
  double median_s = 0.0;
  double min_s = 0.0;
  double rel_stddev = 0.0;  // sample standard deviation / mean
  std::int64_t flops = 0;   // counted, per application
  double gflops = 0.0;      // flops / median_s
  double dofs_per_s = 0.0;
  double gbs = 0.0;         // idealised traffic / median_s
  double checksum = 0.0;    // sum of |w|

  bool operator==(const BenchRecord&) const = default;
};

struct SweepFailure {
  int degree = 0;
  std::int64_t elements = 0;
  std::string message;
};

struct SweepResult {
  std::vector<BenchRecord> records;
  std::vector<SweepFailure> failures;
};

struct SweepOptions {
  KernelVariant kernel = KernelVariant::buffered();
  std::vector<int> degrees{7};
  std::vector<std::int64_t> elements{1, 8, 64, 512, 4096};
  int reps = 10;
  int threads = 0;
  double deformation = 0.1;
  std::uint64_t seed = 42;
};

/// Times every (N, E) pair after one untimed, instrumented warm-up run.
/// Configurations that fail (illegal variant for N, allocation failure,
/// unstable checksum) are reported in `failures` and the sweep continues.
/// Throws std::invalid_argument for reps < 3, empty lists, E < 1 or N < 1.
SweepResult run_sweep(const SweepOptions& options);

/// Order-independent guard value: sum of |w| accumulated in index order.
double field_checksum(const ElementField& w);

std::string records_to_csv(std::span<const BenchRecord> records);
std::vector<BenchRecord> records_from_csv(std::string_view csv);
nlohmann::json records_to_json(std::span<const BenchRecord> records);
std::vector<BenchRecord> records_from_json(const nlohmann::json& doc);

/// Per-degree (E, GFLOP/s) series plus a bar chart at one element count.
struct PlotSeries {
  std::string kernel;
  int degree = 0;
  std::vector<std::pair<std::int64_t, double>> points;
};

struct PlotBar {
  std::string kernel;
  int degree = 0;
  double gflops = 0.0;
};

struct PlotData {
  std::vector<PlotSeries> series;
  std::int64_t bar_elements = 4096;
  std::vector<PlotBar> bars;
};

PlotData reshape_for_plot(std::span<const BenchRecord> records, std::int64_t bar_elements);
nlohmann::json plot_to_json(const PlotData& plot);
std::string plot_to_csv(const PlotData& plot);

}  // namespace semlab
