#include "bitserial/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "bitserial/baselines.hpp"
#include "bitserial/convolution.hpp"
#include "bitserial/errors.hpp"
#include "bitserial/kernels.hpp"
#include "bitserial/quantize.hpp"

namespace bitserial {

namespace {

constexpr const char* kCsvHeader =
    "method,kernel,spatial,channels,bits_a,bits_w,median_seconds,gops,"
    "ratio_vs_best_baseline";

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::mt19937_64 rng_for(std::uint64_t seed, int kernel, int spatial,
                        int channels, std::uint64_t tag) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= (static_cast<std::uint64_t>(kernel) << 48) ^
       (static_cast<std::uint64_t>(spatial) << 32) ^
       (static_cast<std::uint64_t>(channels) << 8) ^ tag;
  h ^= splitmix64(s);
  return std::mt19937_64(h);
}

MatrixF random_normal(std::size_t rows, std::size_t cols,
                      std::mt19937_64& rng) {
  std::normal_distribution<float> dist(0.0f, 1.0f);
  MatrixF out(rows, cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = dist(rng);
  return out;
}

LevelMatrix random_levels(std::size_t rows, std::size_t cols, int bits,
                          std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, (1 << bits) - 1);
  LevelMatrix out(rows, cols, bits);
  for (auto& l : out.levels) l = static_cast<std::uint8_t>(dist(rng));
  return out;
}

std::uint64_t fnv1a_bytes(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Body>
double time_median(Body&& body, int warmup, int repeats, const ClockFn& clock) {
  for (int i = 0; i < warmup; ++i) body();
  std::vector<double> times(repeats);
  for (int i = 0; i < repeats; ++i) {
    const double t0 = clock();
    body();
    times[i] = clock() - t0;
  }
  return std::max(median_of(std::move(times)), 1e-9);
}

MatrixI8 quantize_i8(const MatrixF& values, float scale, int zero) {
  MatrixI8 out(values.rows(), values.cols());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float r = std::round(values.data()[i] / scale) + zero;
    out.data()[i] = static_cast<std::int8_t>(
        std::clamp(r, -128.0f, 127.0f));
  }
  return out;
}

// Rough working-set estimate in MB for one grid point of one method.
double estimate_mb(const ConvShape& shape, BenchMethod method, int bits_a,
                   int bits_w) {
  const double s2 = static_cast<double>(shape.spatial) * shape.spatial;
  const double p = static_cast<double>(shape.out_spatial()) *
                   shape.out_spatial();
  const double k = static_cast<double>(shape.in_channels) * shape.kernel *
                   shape.kernel;
  const double cout = shape.out_channels;
  double bytes = 4.0 * shape.in_channels * s2  // activations
                 + 4.0 * cout * k              // float weights
                 + 4.0 * cout * p;             // output
  const double words = std::ceil(k / 64.0);
  switch (method) {
    case BenchMethod::bitserial:
      bytes += p * k + 8.0 * words * (bits_a * p + bits_w * cout) +
               4.0 * cout * p;
      break;
    case BenchMethod::f32_ref:
      bytes += 4.0 * k * p;
      break;
    case BenchMethod::i8_ref:
      bytes += k * p + shape.in_channels * s2 + 4.0 * cout * p;
      break;
    case BenchMethod::winograd_ref:
      bytes += 4.0 * cout * shape.in_channels * 16.0;
      break;
  }
  return bytes / (1024.0 * 1024.0);
}

BenchRecord skipped_record(BenchMethod method, int kernel, int spatial,
                           int channels, int bits_a, int bits_w,
                           std::string reason) {
  BenchRecord r;
  r.method = method_name(method);
  r.kernel = kernel;
  r.spatial = spatial;
  r.channels = channels;
  r.bits_a = bits_a;
  r.bits_w = bits_w;
  r.skipped = true;
  r.skip_reason = std::move(reason);
  return r;
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

const char* method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::bitserial: return "bitserial";
    case BenchMethod::f32_ref: return "f32_ref";
    case BenchMethod::i8_ref: return "i8_ref";
    case BenchMethod::winograd_ref: return "winograd_ref";
  }
  return "?";
}

std::optional<BenchMethod> method_from_name(const std::string& name) {
  if (name == "bitserial") return BenchMethod::bitserial;
  if (name == "f32_ref") return BenchMethod::f32_ref;
  if (name == "i8_ref") return BenchMethod::i8_ref;
  if (name == "winograd_ref") return BenchMethod::winograd_ref;
  return std::nullopt;
}

void SweepConfig::validate() const {
  if (repeats < 3)
    throw ConfigError("SweepConfig: repeats must be >= 3 for a stable median");
  if (warmup < 0) throw ConfigError("SweepConfig: warmup must be >= 0");
  if (kernels.empty() || spatial.empty() || channels.empty() ||
      methods.empty())
    throw ConfigError("SweepConfig: empty grid axis");
  for (int k : kernels)
    if (k != 1 && k != 3)
      throw ConfigError("SweepConfig: kernels must be 1 or 3");
  for (int s : spatial)
    if (s < 1) throw ConfigError("SweepConfig: spatial sizes must be >= 1");
  for (int c : channels)
    if (c < 1) throw ConfigError("SweepConfig: channel sizes must be >= 1");
  const bool has_bitserial =
      std::find(methods.begin(), methods.end(), BenchMethod::bitserial) !=
      methods.end();
  if (has_bitserial && bit_pairs.empty())
    throw ConfigError("SweepConfig: bitserial requested with no bit pairs");
  for (auto [a, w] : bit_pairs)
    if (a < 1 || a > 8 || w < 1 || w > 8)
      throw ConfigError("SweepConfig: bit depths must be in 1..8");
  if (!(mem_budget_mb > 0))
    throw ConfigError("SweepConfig: memory budget must be positive");
}

ClockFn steady_clock_fn() {
  return [] {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
}

ClockFn fake_clock(double step_seconds) {
  auto counter = std::make_shared<std::uint64_t>(0);
  return [counter, step_seconds] {
    return static_cast<double>((*counter)++) * step_seconds;
  };
}

std::vector<BenchRecord> run_sweep(const SweepConfig& cfg, ClockFn clock) {
  cfg.validate();
  if (!clock) {
    const char* env = std::getenv("BENCH_NO_TIME");
    clock = (env && std::strcmp(env, "1") == 0) ? fake_clock()
                                                : steady_clock_fn();
  }

  std::vector<BenchRecord> records;
  for (int kernel : cfg.kernels) {
    for (int s : cfg.spatial) {
      for (int c : cfg.channels) {
        const ConvShape shape{s, c, c, kernel, 1, kernel == 1 ? 0 : 1};
        const double gop = static_cast<double>(conv_gop_count(shape));
        auto act_rng = rng_for(cfg.seed, kernel, s, c, 1);
        auto wts_rng = rng_for(cfg.seed, kernel, s, c, 2);
        const MatrixF acts = random_normal(c, static_cast<std::size_t>(s) * s,
                                           act_rng);
        const MatrixF wts = random_normal(
            c, static_cast<std::size_t>(c) * kernel * kernel, wts_rng);

        std::vector<BenchRecord> point;
        auto add = [&](BenchMethod m, int ba, int bw, double median,
                       std::uint64_t checksum) {
          BenchRecord r;
          r.method = method_name(m);
          r.kernel = kernel;
          r.spatial = s;
          r.channels = c;
          r.bits_a = ba;
          r.bits_w = bw;
          r.median_seconds = median;
          r.gops = gop / median / 1e9;
          r.output_checksum = checksum;
          point.push_back(std::move(r));
        };

        for (BenchMethod method : cfg.methods) {
          if (method == BenchMethod::winograd_ref && kernel != 3) {
            point.push_back(skipped_record(method, kernel, s, c, 0, 0,
                                           "kernel-unsupported"));
            continue;
          }
          if (method == BenchMethod::bitserial) {
            for (auto [ba, bw] : cfg.bit_pairs) {
              if (estimate_mb(shape, method, ba, bw) > cfg.mem_budget_mb) {
                point.push_back(
                    skipped_record(method, kernel, s, c, ba, bw, "mem-budget"));
                continue;
              }
              const QuantParams act_params{ba, 0.0,
                                           2.5 / ((1 << ba) - 1)};
              const QuantParams wt_params =
                  bw == 1 ? kBipolar
                          : QuantParams{bw, -1.0, 2.0 / ((1 << bw) - 1)};
              auto lvl_rng = rng_for(cfg.seed, kernel, s, c,
                                     0x100u + (static_cast<std::uint64_t>(ba)
                                               << 8) + bw);
              const LevelMatrix wlevels = random_levels(
                  c, static_cast<std::size_t>(c) * kernel * kernel, bw,
                  lvl_rng);
              // weights are packed once, outside the timed region
              const FilterBank bank(wlevels, wt_params, c, kernel);
              MatrixF sink;
              auto body = [&] {
                QuantTensor qin{c, s, s, quantize_uniform(acts, act_params),
                                act_params};
                sink = conv_bitserial(qin, bank, shape);
              };
              const double median =
                  time_median(body, cfg.warmup, cfg.repeats, clock);
              add(method, ba, bw, median,
                  fnv1a_bytes(sink.data(), sink.size() * sizeof(float)));
            }
            continue;
          }
          if (estimate_mb(shape, method, 0, 0) > cfg.mem_budget_mb) {
            point.push_back(
                skipped_record(method, kernel, s, c, 0, 0, "mem-budget"));
            continue;
          }
          if (method == BenchMethod::f32_ref) {
            MatrixF sink;
            auto body = [&] {
              const MatrixF patches = im2col_f32(acts, shape);
              sink = gemm_f32_blocked(wts, patches);
            };
            const double median =
                time_median(body, cfg.warmup, cfg.repeats, clock);
            add(method, 0, 0, median,
                fnv1a_bytes(sink.data(), sink.size() * sizeof(float)));
          } else if (method == BenchMethod::i8_ref) {
            constexpr float kActScale = 3.0f / 127.0f;
            constexpr float kWtScale = 3.0f / 127.0f;
            constexpr int kActZero = 7;
            constexpr int kWtZero = -3;
            // weight quantization is weight prep, excluded from the timing
            const MatrixI8 wq = quantize_i8(wts, kWtScale, kWtZero);
            MatrixI32 sink;
            auto body = [&] {
              const MatrixI8 aq = quantize_i8(acts, kActScale, kActZero);
              const MatrixI8 patches =
                  im2col_i8(aq, shape, static_cast<std::int8_t>(kActZero));
              sink = gemm_i8_i32(wq, kWtZero, patches, kActZero);
            };
            const double median =
                time_median(body, cfg.warmup, cfg.repeats, clock);
            add(method, 0, 0, median,
                fnv1a_bytes(sink.data(), sink.size() * sizeof(std::int32_t)));
          } else {  // winograd_ref
            // prime the filter-transform cache outside the timed region
            (void)winograd_conv_3x3(acts, wts, shape, false);
            MatrixF sink;
            auto body = [&] { sink = winograd_conv_3x3(acts, wts, shape, false); };
            const double median =
                time_median(body, cfg.warmup, cfg.repeats, clock);
            add(method, 0, 0, median,
                fnv1a_bytes(sink.data(), sink.size() * sizeof(float)));
          }
        }

        double best_baseline = 0.0;
        for (const auto& r : point)
          if (!r.skipped && r.method != "bitserial")
            best_baseline = std::max(best_baseline, r.gops);
        if (best_baseline > 0.0)
          for (auto& r : point)
            if (!r.skipped && r.method == "bitserial")
              r.ratio_vs_best_baseline = r.gops / best_baseline;

        for (auto& r : point) records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::string csv_string(const std::vector<BenchRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  out +=
      "# timed_region=activation-quantize+lowering+pack+gemm (weight packing "
      "and filter transforms excluded)\n";
  out += "# gop_convention=2-ops-per-multiply-accumulate\n";
  out += "# padding=same-for-3x3(level-0/offset),none-for-1x1\n";
  for (const auto& r : records) {
    if (r.skipped) {
      out += "# skipped method=" + r.method +
             " kernel=" + std::to_string(r.kernel) + "x" +
             std::to_string(r.kernel) + " spatial=" + std::to_string(r.spatial) +
             " channels=" + std::to_string(r.channels) +
             " reason=" + r.skip_reason + "\n";
      continue;
    }
    out += r.method;
    out += ',' + std::to_string(r.kernel) + "x" + std::to_string(r.kernel);
    out += ',' + std::to_string(r.spatial);
    out += ',' + std::to_string(r.channels);
    out += ',' + std::to_string(r.bits_a);
    out += ',' + std::to_string(r.bits_w);
    out += ',' + format_g9(r.median_seconds);
    out += ',' + format_g9(r.gops);
    out += ',';
    if (r.ratio_vs_best_baseline) out += format_g9(*r.ratio_vs_best_baseline);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<BenchRecord>& records,
              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot open " + path + " for writing");
  out << csv_string(records);
  if (!out) throw IoError("emit_csv: write failed for " + path);
}

std::vector<BenchRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("parse_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw IoError("parse_csv: unexpected header: " + line);
  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(std::move(cur));
    if (fields.size() != 9)
      throw IoError("parse_csv: expected 9 fields, got " +
                    std::to_string(fields.size()));
    BenchRecord r;
    r.method = fields[0];
    r.kernel = std::stoi(fields[1]);  // "1x1" -> 1, "3x3" -> 3
    r.spatial = std::stoi(fields[2]);
    r.channels = std::stoi(fields[3]);
    r.bits_a = std::stoi(fields[4]);
    r.bits_w = std::stoi(fields[5]);
    r.median_seconds = std::stod(fields[6]);
    r.gops = std::stod(fields[7]);
    if (!fields[8].empty()) r.ratio_vs_best_baseline = std::stod(fields[8]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BenchRecord> parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("parse_csv: cannot open " + path);
  return parse_csv(in);
}

std::string emit_ratio_grid(const std::vector<BenchRecord>& records) {
  // best baseline GOP/s per (kernel, S, C)
  std::map<std::tuple<int, int, int>, double> best;
  for (const auto& r : records) {
    if (r.skipped || r.method == "bitserial") continue;
    auto key = std::make_tuple(r.kernel, r.spatial, r.channels);
    auto it = best.find(key);
    if (it == best.end() || r.gops > it->second) best[key] = r.gops;
  }

  std::set<std::tuple<int, int, int>> groups;  // (kernel, bits_a, bits_w)
  for (const auto& r : records)
    if (!r.skipped && r.method == "bitserial")
      groups.insert({r.kernel, r.bits_a, r.bits_w});

  std::string out;
  char buf[64];
  for (const auto& [kernel, ba, bw] : groups) {
    std::set<int> s_values, c_values;
    std::map<std::pair<int, int>, double> gops;  // (S, C) -> bitserial gops
    for (const auto& r : records) {
      if (r.skipped || r.method != "bitserial" || r.kernel != kernel ||
          r.bits_a != ba || r.bits_w != bw)
        continue;
      s_values.insert(r.spatial);
      c_values.insert(r.channels);
      gops[{r.spatial, r.channels}] = r.gops;
    }
    std::snprintf(buf, sizeof(buf),
                  "kernel=%dx%d bits=%dx%d  (binary GOP/s / best baseline "
                  "GOP/s)\n",
                  kernel, kernel, ba, bw);
    out += buf;
    out += "    C\\S";
    for (int s : s_values) {
      std::snprintf(buf, sizeof(buf), "%8d", s);
      out += buf;
    }
    out += '\n';
    for (int c : c_values) {
      std::snprintf(buf, sizeof(buf), "%7d", c);
      out += buf;
      for (int s : s_values) {
        const auto g = gops.find({s, c});
        const auto b = best.find(std::make_tuple(kernel, s, c));
        if (g == gops.end() || b == best.end() || !(b->second > 0.0)) {
          out += "       —";
        } else {
          std::snprintf(buf, sizeof(buf), "%8.2f", g->second / b->second);
          out += buf;
        }
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

}  // namespace bitserial
