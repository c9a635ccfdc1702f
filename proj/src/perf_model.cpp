#include "semlab/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace semlab {

namespace {

const std::set<std::string> kTopLevelKeys = {
    "name",      "kind",      "freq_mhz",   "bandwidth_gbs",   "peak_gflops",   "alm_total",
    "dsp_total", "bram_total", "throughput_rule", "override_bound"};

const std::set<std::string> kSections = {"r_add",
                                         "r_mult",
                                         "freq_mhz_by_degree",
                                         "r_base",
                                         "bram_per_element",
                                         "throughput_override",
                                         "measured_dofs_per_cycle"};

// Sections prefixed with this carry reference data only.
constexpr std::string_view kReferencePrefix = "ref_";

double number(const KvValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw DeviceFileError("'" + key + "' must be a number", 0);
}

std::string text(const KvValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw DeviceFileError("'" + key + "' must be a string", 0);
}

int degree_key(const std::string& section, const std::string& key) {
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
  } catch (const std::exception&) {
    throw DeviceFileError("[" + section + "] keys must be polynomial degrees, got '" + key + "'", 0);
  }
  if (n < 1) throw DeviceFileError("[" + section + "] degree must be >= 1", 0);
  return n;
}

std::map<int, double> degree_table(const KvDocument& doc, const std::string& section) {
  std::map<int, double> out;
  const auto s = doc.sections.find(section);
  if (s == doc.sections.end()) return out;
  for (const auto& [key, value] : s->second)
    out[degree_key(section, key)] = number(value, section + "." + key);
  return out;
}

ResourceCost resource_cost(const KvDocument& doc, const std::string& section) {
  ResourceCost c;
  const auto s = doc.sections.find(section);
  if (s == doc.sections.end()) return c;
  for (const auto& [key, value] : s->second) {
    if (key == "dsp")
      c.dsp = number(value, section + ".dsp");
    else if (key == "alm")
      c.alm = number(value, section + ".alm");
    else
      throw DeviceFileError("unknown key '" + key + "' in [" + section + "]", 0);
  }
  return c;
}

}  // namespace

std::string to_string(ThroughputRule rule) {
  switch (rule) {
    case ThroughputRule::pow2_divisor: return "pow2_divisor";
    case ThroughputRule::pow2: return "pow2";
    case ThroughputRule::continuous: return "continuous";
  }
  return "?";
}

std::string to_string(Bound bound) {
  switch (bound) {
    case Bound::bandwidth: return "bandwidth";
    case Bound::logic: return "logic";
    case Bound::dsp: return "dsp";
    case Bound::bram: return "bram";
  }
  return "?";
}

ThroughputRule parse_throughput_rule(const std::string& s) {
  if (s == "pow2_divisor") return ThroughputRule::pow2_divisor;
  if (s == "pow2") return ThroughputRule::pow2;
  if (s == "continuous") return ThroughputRule::continuous;
  throw std::invalid_argument("unknown throughput_rule '" + s + "'");
}

Bound parse_bound(const std::string& s) {
  if (s == "bandwidth") return Bound::bandwidth;
  if (s == "logic") return Bound::logic;
  if (s == "dsp") return Bound::dsp;
  if (s == "bram") return Bound::bram;
  throw std::invalid_argument("unknown bound '" + s + "'");
}

double DeviceSpec::frequency_hz(int degree) const {
  const auto it = freq_mhz_by_degree.find(degree);
  return (it != freq_mhz_by_degree.end() ? it->second : freq_mhz) * 1e6;
}

BaseUsage DeviceSpec::base(int degree) const {
  const auto it = r_base.find(degree);
  return it != r_base.end() ? it->second : BaseUsage{};
}

void DeviceSpec::validate() const {
  if (!(freq_mhz > 0.0)) throw std::invalid_argument(name + ": freq_mhz must be positive");
  if (!(bandwidth_gbs > 0.0)) throw std::invalid_argument(name + ": bandwidth_gbs must be positive");
  for (const auto& [n, f] : freq_mhz_by_degree)
    if (!(f > 0.0)) throw std::invalid_argument(name + ": per-degree frequency must be positive");
  if (alm_total < 0 || dsp_total < 0 || bram_total < 0)
    throw std::invalid_argument(name + ": resource totals must be non-negative");
  if (r_add.dsp < 0 || r_add.alm < 0 || r_mult.dsp < 0 || r_mult.alm < 0)
    throw std::invalid_argument(name + ": per-operation costs must be non-negative");
  for (const auto& [n, b] : r_base)
    if (b.dsp < 0 || b.alm < 0 || b.bram < 0)
      throw std::invalid_argument(name + ": base usage must be non-negative");
  for (const auto& [n, b] : bram_per_element)
    if (b < 0) throw std::invalid_argument(name + ": bram_per_element must be non-negative");
  for (const auto& [n, t] : throughput_override)
    if (!(t > 0.0)) throw std::invalid_argument(name + ": throughput overrides must be positive");
  if (peak_gflops && !(*peak_gflops > 0.0))
    throw std::invalid_argument(name + ": peak_gflops must be positive");
}

DeviceSpec device_from_kv(const KvDocument& doc) {
  for (const auto& [section, keys] : doc.sections) {
    if (section.empty() || kSections.contains(section) || section.starts_with(kReferencePrefix))
      continue;
    throw DeviceFileError("unknown section [" + section + "]", 0);
  }

  DeviceSpec d;
  for (const auto& [key, value] : doc.sections.at("")) {
    if (!kTopLevelKeys.contains(key)) throw DeviceFileError("unknown key '" + key + "'", 0);
    if (key == "name") d.name = text(value, key);
    if (key == "kind") d.kind = text(value, key);
    if (key == "freq_mhz") d.freq_mhz = number(value, key);
    if (key == "bandwidth_gbs") d.bandwidth_gbs = number(value, key);
    if (key == "peak_gflops") d.peak_gflops = number(value, key);
    if (key == "alm_total") d.alm_total = number(value, key);
    if (key == "dsp_total") d.dsp_total = number(value, key);
    if (key == "bram_total") d.bram_total = number(value, key);
    if (key == "throughput_rule") d.throughput_rule = parse_throughput_rule(text(value, key));
    if (key == "override_bound") d.override_bound = parse_bound(text(value, key));
  }
  for (const char* required : {"name", "freq_mhz", "bandwidth_gbs"})
    if (!doc.has("", required))
      throw DeviceFileError(std::string("missing required key '") + required + "'", 0);

  d.r_add = resource_cost(doc, "r_add");
  d.r_mult = resource_cost(doc, "r_mult");
  d.freq_mhz_by_degree = degree_table(doc, "freq_mhz_by_degree");
  d.bram_per_element = degree_table(doc, "bram_per_element");
  d.throughput_override = degree_table(doc, "throughput_override");
  d.measured_dofs_per_cycle = degree_table(doc, "measured_dofs_per_cycle");

  if (const auto s = doc.sections.find("r_base"); s != doc.sections.end()) {
    for (const auto& [key, value] : s->second) {
      const auto* arr = std::get_if<std::vector<double>>(&value);
      if (!arr || arr->size() != 3)
        throw DeviceFileError("[r_base] entries must be [dsp, alm, bram]", 0);
      d.r_base[degree_key("r_base", key)] = {(*arr)[0], (*arr)[1], (*arr)[2]};
    }
  }
  d.validate();
  return d;
}

DeviceSpec load_device(const std::filesystem::path& path) {
  try {
    return device_from_kv(parse_kv_file(path));
  } catch (const DeviceFileError& e) {
    throw DeviceFileError(path.string() + ": " + e.what(), 0);
  }
}

Cost cost(int degree) {
  if (degree < 1) throw std::invalid_argument("cost: N must be >= 1");
  const std::int64_t nx = degree + 1;
  return {6 * nx + 6, 6 * nx + 9};
}

std::int64_t flops_per_dof(int degree) { return cost(degree).flops(); }

DofTraffic traffic_per_dof(int degree) {
  if (degree < 1) throw std::invalid_argument("traffic_per_dof: N must be >= 1");
  return {};
}

double intensity(int degree) {
  return static_cast<double>(flops_per_dof(degree)) / (kWordsPerDof * kBytesPerDouble);
}

double bandwidth_throughput(double bytes_per_s) {
  if (!(bytes_per_s > 0.0)) throw std::invalid_argument("bandwidth_throughput: B must be positive");
  return bytes_per_s / (kWordsPerDof * kBytesPerDouble);
}

ResourceThroughput resource_throughput(const DeviceSpec& device, int degree) {
  if (const auto it = device.throughput_override.find(degree);
      it != device.throughput_override.end())
    return {it->second, device.override_bound, true};

  const auto base = device.base(degree);
  if (base.dsp > device.dsp_total || base.alm > device.alm_total || base.bram > device.bram_total)
    throw InfeasibleError(device.name + ": insufficient base resources at N=" +
                          std::to_string(degree));

  const auto c = cost(degree);
  const double dsp_per_dof = c.adds * device.r_add.dsp + c.mults * device.r_mult.dsp;
  const double alm_per_dof = c.adds * device.r_add.alm + c.mults * device.r_mult.alm;
  const double t_dsp = dsp_per_dof > 0.0 ? (device.dsp_total - base.dsp) / dsp_per_dof : kUnbounded;
  const double t_alm = alm_per_dof > 0.0 ? (device.alm_total - base.alm) / alm_per_dof : kUnbounded;
  if (t_dsp < t_alm) return {t_dsp, Bound::dsp, false};
  return {t_alm, Bound::logic, false};
}

std::optional<int> constrain_throughput(double t_raw, int degree) {
  if (!(t_raw >= 1.0)) return std::nullopt;
  const int nx = degree + 1;
  int t = 1;
  while (2.0 * t <= t_raw && nx % (2 * t) == 0) t *= 2;
  return t;
}

std::optional<double> apply_throughput_rule(ThroughputRule rule, double t_raw, int degree) {
  // A processor can retire a fraction of a DOF per clock; a fixed datapath cannot.
  if (rule == ThroughputRule::continuous) {
    if (t_raw > 0.0) return t_raw;
    return std::nullopt;
  }
  if (!(t_raw >= 1.0)) return std::nullopt;
  switch (rule) {
    case ThroughputRule::pow2_divisor:
      return static_cast<double>(*constrain_throughput(t_raw, degree));
    case ThroughputRule::pow2: {
      double t = 1.0;
      while (2.0 * t <= t_raw) t *= 2.0;
      return t;
    }
    case ThroughputRule::continuous:
      break;
  }
  return std::nullopt;
}

ModelReport peak_performance(const DeviceSpec& device, int degree) {
  ModelReport r;
  r.degree = degree;
  r.cost = cost(degree);
  r.traffic = traffic_per_dof(degree);
  r.intensity = intensity(degree);
  r.freq_hz = device.frequency_hz(degree);
  r.t_bandwidth_dofs_per_s = bandwidth_throughput(device.bandwidth_bytes_per_s());
  r.t_bandwidth_per_cycle = r.t_bandwidth_dofs_per_s / r.freq_hz;
  r.roofline_gflops = r.intensity * device.bandwidth_gbs;
  if (device.peak_gflops) r.attainable_gflops = std::min(*device.peak_gflops, r.roofline_gflops);

  const auto res = resource_throughput(device, degree);
  r.t_resource = res.dofs_per_cycle;

  if (const auto it = device.bram_per_element.find(degree); it != device.bram_per_element.end()) {
    if (device.base(degree).bram + it->second > device.bram_total)
      throw InfeasibleError(device.name + ": BRAM-bound, element buffers do not fit at N=" +
                            std::to_string(degree));
  }

  if (r.t_bandwidth_per_cycle < res.dofs_per_cycle) {
    r.t_raw = r.t_bandwidth_per_cycle;
    r.bound = Bound::bandwidth;
  } else {
    r.t_raw = res.dofs_per_cycle;
    r.bound = res.binding;
  }

  const auto t = apply_throughput_rule(device.throughput_rule, r.t_raw, degree);
  if (!t)
    throw InfeasibleError(device.name + ": less than one DOF per cycle at N=" +
                          std::to_string(degree));
  r.t_max = *t;
  r.p_max_gflops = static_cast<double>(r.cost.flops()) * r.t_max * r.freq_hz * 1e-9;

  if (const auto it = device.measured_dofs_per_cycle.find(degree);
      it != device.measured_dofs_per_cycle.end()) {
    r.measured_dofs_per_cycle = it->second;
    r.model_error_percent = model_error(r.t_max, it->second);
  }
  return r;
}

double padding_gain(int degree, int t2, int pad) {
  if (t2 < 1) throw std::invalid_argument("padding_gain: T2 must be >= 1");
  if (pad < 1) throw std::invalid_argument("padding_gain: padding must be >= 1");
  if ((degree + 1 + pad) % t2 != 0)
    throw std::invalid_argument("padding_gain: T2 must divide N+1+p");
  const double ratio = static_cast<double>(degree + 1) / (degree + 1 + pad);
  return t2 * ratio * ratio * ratio;
}

double model_error(double predicted, double measured) {
  if (!(predicted > 0.0)) throw std::invalid_argument("model_error: prediction must be positive");
  return 100.0 * (predicted - measured) / predicted;
}

}  // namespace semlab
