#include "semlab/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <new>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "semlab/geometry.hpp"
#include "semlab/int_list.hpp"

namespace semlab {

namespace {

constexpr const char* kCsvHeader =
    "kernel,degree,elements,reps,threads,median_s,min_s,rel_stddev,flops,gflops,dofs_per_s,gbs,"
    "checksum";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad CSV field '" + std::string(s) + "'");
  return v;
}

BenchRecord time_configuration(const SweepOptions& options, int degree, std::int64_t elements) {
  options.kernel.validate(degree);
  const auto basis = build_basis(degree);
  const auto extents = factor_extents(elements);
  const auto mesh = build_box_mesh(extents, {0.0, 0.0, 0.0},
                                   {double(extents[0]), double(extents[1]), double(extents[2])},
                                   options.deformation);
  const auto g = build_geom_factors(mesh, basis);
  auto u = ElementField::zeros(degree, elements);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& x : u.values) x = dist(rng);

  OpCounters counters;
  const auto warm = ax_apply(options.kernel, u, g, basis, &counters, options.threads);
  const double expected_checksum = field_checksum(warm);

  std::vector<double> times;
  times.reserve(options.reps);
  for (int r = 0; r < options.reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const auto w = ax_apply(options.kernel, u, g, basis, nullptr, options.threads);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
    if (field_checksum(w) != expected_checksum)
      throw std::runtime_error("checksum changed between repetitions");
  }

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / n;
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  var /= (n - 1);

  const auto traffic = ax_traffic(degree, elements);
  BenchRecord rec;
  rec.kernel = options.kernel.id();
  rec.degree = degree;
  rec.elements = elements;
  rec.reps = options.reps;
  rec.threads = options.kernel.kind == KernelKind::reference
                    ? 1
                    : (options.threads > 0 ? options.threads : omp_get_max_threads());
  rec.median_s = median;
  rec.min_s = sorted.front();
  rec.rel_stddev = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  rec.flops = counters.flops();
  rec.gflops = rec.flops / median * 1e-9;
  rec.dofs_per_s = static_cast<double>(u.size()) / median;
  rec.gbs = static_cast<double>(traffic.loads_bytes + traffic.writes_bytes) / median * 1e-9;
  rec.checksum = expected_checksum;
  return rec;
}

}  // namespace

double field_checksum(const ElementField& w) {
  double s = 0.0;
  for (double v : w.values) s += std::abs(v);
  return s;
}

SweepResult run_sweep(const SweepOptions& options) {
  if (options.reps < 3) throw std::invalid_argument("run_sweep: reps must be >= 3");
  if (options.degrees.empty() || options.elements.empty())
    throw std::invalid_argument("run_sweep: empty degree or element list");
  for (auto e : options.elements)
    if (e < 1) throw std::invalid_argument("run_sweep: element counts must be >= 1");
  for (auto n : options.degrees)
    if (n < 1 || n > SpectralBasis::kMaxDegree)
      throw std::invalid_argument("run_sweep: degrees must be in [1, 31]");

  SweepResult result;
  for (int degree : options.degrees)
    for (auto elements : options.elements) {
      try {
        result.records.push_back(time_configuration(options, degree, elements));
      } catch (const std::bad_alloc&) {
        result.failures.push_back({degree, elements, "out of memory"});
      } catch (const std::exception& ex) {
        result.failures.push_back({degree, elements, ex.what()});
      }
    }
  return result;
}

std::string records_to_csv(std::span<const BenchRecord> records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : records)
    out << r.kernel << ',' << r.degree << ',' << r.elements << ',' << r.reps << ',' << r.threads
        << ',' << format_double(r.median_s) << ',' << format_double(r.min_s) << ','
        << format_double(r.rel_stddev) << ',' << r.flops << ',' << format_double(r.gflops) << ','
        << format_double(r.dofs_per_s) << ',' << format_double(r.gbs) << ','
        << format_double(r.checksum) << '\n';
  return out.str();
}

std::vector<BenchRecord> records_from_csv(std::string_view csv) {
  std::vector<BenchRecord> out;
  bool header = true;
  for (auto line : split(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 13) throw std::invalid_argument("CSV row must have 13 fields");
    BenchRecord r;
    r.kernel = std::string(f[0]);
    r.degree = parse_field<int>(f[1]);
    r.elements = parse_field<std::int64_t>(f[2]);
    r.reps = parse_field<int>(f[3]);
    r.threads = parse_field<int>(f[4]);
    r.median_s = parse_field<double>(f[5]);
    r.min_s = parse_field<double>(f[6]);
    r.rel_stddev = parse_field<double>(f[7]);
    r.flops = parse_field<std::int64_t>(f[8]);
    r.gflops = parse_field<double>(f[9]);
    r.dofs_per_s = parse_field<double>(f[10]);
    r.gbs = parse_field<double>(f[11]);
    r.checksum = parse_field<double>(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json records_to_json(std::span<const BenchRecord> records) {
  auto arr = nlohmann::json::array();
  for (const auto& r : records)
    arr.push_back({{"kernel", r.kernel},         {"degree", r.degree},
                   {"elements", r.elements},     {"reps", r.reps},
                   {"threads", r.threads},       {"median_s", r.median_s},
                   {"min_s", r.min_s},           {"rel_stddev", r.rel_stddev},
                   {"flops", r.flops},           {"gflops", r.gflops},
                   {"dofs_per_s", r.dofs_per_s}, {"gbs", r.gbs},
                   {"checksum", r.checksum}});
  return {{"records", arr}};
}

std::vector<BenchRecord> records_from_json(const nlohmann::json& doc) {
  std::vector<BenchRecord> out;
  for (const auto& j : doc.at("records")) {
    BenchRecord r;
    j.at("kernel").get_to(r.kernel);
    j.at("degree").get_to(r.degree);
    j.at("elements").get_to(r.elements);
    j.at("reps").get_to(r.reps);
    j.at("threads").get_to(r.threads);
    j.at("median_s").get_to(r.median_s);
    j.at("min_s").get_to(r.min_s);
    j.at("rel_stddev").get_to(r.rel_stddev);
    j.at("flops").get_to(r.flops);
    j.at("gflops").get_to(r.gflops);
    j.at("dofs_per_s").get_to(r.dofs_per_s);
    j.at("gbs").get_to(r.gbs);
    j.at("checksum").get_to(r.checksum);
    out.push_back(std::move(r));
  }
  return out;
}

PlotData reshape_for_plot(std::span<const BenchRecord> records, std::int64_t bar_elements) {
  std::map<std::pair<std::string, int>, std::map<std::int64_t, double>> grouped;
  for (const auto& r : records) grouped[{r.kernel, r.degree}][r.elements] = r.gflops;

  PlotData plot;
  plot.bar_elements = bar_elements;
  for (const auto& [key, points] : grouped) {
    PlotSeries s{key.first, key.second, {points.begin(), points.end()}};
    plot.series.push_back(std::move(s));
    if (const auto it = points.find(bar_elements); it != points.end())
      plot.bars.push_back({key.first, key.second, it->second});
  }
  return plot;
}

nlohmann::json plot_to_json(const PlotData& plot) {
  auto series = nlohmann::json::array();
  for (const auto& s : plot.series) {
    auto pts = nlohmann::json::array();
    for (const auto& [e, gf] : s.points) pts.push_back({{"elements", e}, {"gflops", gf}});
    series.push_back({{"kernel", s.kernel}, {"degree", s.degree}, {"points", pts}});
  }
  auto bars = nlohmann::json::array();
  for (const auto& b : plot.bars)
    bars.push_back({{"kernel", b.kernel}, {"degree", b.degree}, {"gflops", b.gflops}});
  return {{"series", series}, {"bar_elements", plot.bar_elements}, {"bars", bars}};
}

std::string plot_to_csv(const PlotData& plot) {
  std::ostringstream out;
  out << "chart,kernel,degree,elements,gflops\n";
  for (const auto& s : plot.series)
    for (const auto& [e, gf] : s.points)
      out << "series," << s.kernel << ',' << s.degree << ',' << e << ',' << format_double(gf)
          << '\n';
  for (const auto& b : plot.bars)
    out << "bar," << b.kernel << ',' << b.degree << ',' << plot.bar_elements << ','
        << format_double(b.gflops) << '\n';
  return out.str();
}

}  // namespace semlab
