#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semlab/device_file.hpp"

namespace semlab {

/// Raised when a device cannot run the kernel at all (base resources exceed
/// the totals, BRAM does not fit, or a fixed datapath gets below one DOF per
/// cycle).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kBytesPerDouble = 8;
/// Words moved per DOF: seven loads and one write.
inline constexpr int kWordsPerDof = 8;
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct ResourceCost {
  double dsp = 0.0;
  double alm = 0.0;
};

struct BaseUsage {
  double dsp = 0.0;
  double alm = 0.0;
  double bram = 0.0;
};

/// How a continuous DOFs/cycle figure is turned into an implementable one.
///  - pow2_divisor: largest 2^k <= T that divides N+1 (arbitration-free unroll)
///  - pow2: largest 2^k <= T
///  - continuous: T unchanged (idealised datapath, pure roofline)
enum class ThroughputRule { pow2_divisor, pow2, continuous };

enum class Bound { bandwidth, logic, dsp, bram };

std::string to_string(ThroughputRule rule);
std::string to_string(Bound bound);
ThroughputRule parse_throughput_rule(const std::string& text);
Bound parse_bound(const std::string& text);

struct DeviceSpec {
  std::string name;
  std::string kind = "fpga";
  double freq_mhz = 0.0;
  std::map<int, double> freq_mhz_by_degree;
  double bandwidth_gbs = 0.0;
  std::optional<double> peak_gflops;
  double alm_total = 0.0;
  double dsp_total = 0.0;
  double bram_total = 0.0;
  ResourceCost r_add;
  ResourceCost r_mult;
  std::map<int, BaseUsage> r_base;
  std::map<int, double> bram_per_element;
  std::map<int, double> throughput_override;
  Bound override_bound = Bound::logic;
  ThroughputRule throughput_rule = ThroughputRule::pow2_divisor;
  std::map<int, double> measured_dofs_per_cycle;

  double frequency_hz(int degree) const;
  double bandwidth_bytes_per_s() const { return bandwidth_gbs * 1e9; }
  BaseUsage base(int degree) const;
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

DeviceSpec device_from_kv(const KvDocument& doc);
DeviceSpec load_device(const std::filesystem::path& path);

struct Cost {
  std::int64_t adds = 0;
  std::int64_t mults = 0;
  std::int64_t flops() const { return adds + mults; }
  bool operator==(const Cost&) const = default;
};

/// Adds and multiplies per DOF: (6(N+1)+6, 6(N+1)+9).
Cost cost(int degree);
/// FLOPs per DOF, 12(N+1)+15.
std::int64_t flops_per_dof(int degree);

struct DofTraffic {
  int loads = 7;
  int writes = 1;
};
DofTraffic traffic_per_dof(int degree);

/// FLOP per byte of idealised external traffic.
double intensity(int degree);

/// DOFs per second sustainable from a bandwidth in bytes/s.
double bandwidth_throughput(double bytes_per_s);

struct ResourceThroughput {
  double dofs_per_cycle = kUnbounded;
  Bound binding = Bound::logic;
  bool from_override = false;
};

/// DOFs/cycle the compute resources can sustain. A per-degree override wins.
/// Throws InfeasibleError when R_base(N) exceeds the device totals.
ResourceThroughput resource_throughput(const DeviceSpec& device, int degree);

/// Largest 2^k <= t_raw that divides N+1; nullopt when t_raw < 1.
std::optional<int> constrain_throughput(double t_raw, int degree);

/// Applies `rule`; nullopt when t_raw < 1 (t_raw <= 0 for the continuous rule).
std::optional<double> apply_throughput_rule(ThroughputRule rule, double t_raw, int degree);

struct ModelReport {
  int degree = 0;
  Cost cost;
  DofTraffic traffic;
  double intensity = 0.0;
  double freq_hz = 0.0;
  double t_bandwidth_dofs_per_s = 0.0;
  double t_bandwidth_per_cycle = 0.0;
  double t_resource = kUnbounded;
  double t_raw = 0.0;
  double t_max = 0.0;
  double p_max_gflops = 0.0;
  Bound bound = Bound::bandwidth;
  double roofline_gflops = 0.0;
  std::optional<double> attainable_gflops;  // min(peak, roofline) when a peak is known
  std::optional<double> measured_dofs_per_cycle;
  std::optional<double> model_error_percent;
};

/// Evaluates the model at one degree. Throws InfeasibleError if the device
/// cannot run it.
ModelReport peak_performance(const DeviceSpec& device, int degree);

/// Effective DOFs/cycle after padding N+1 to N+1+p and running at T2:
/// T2 ((N+1)/(N+1+p))^3.
double padding_gain(int degree, int t2, int pad);

/// 100 (predicted - measured) / predicted.
double model_error(double predicted, double measured);

}  // namespace semlab
