#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bitserial {

enum class BenchMethod { bitserial, f32_ref, i8_ref, winograd_ref };

const char* method_name(BenchMethod m);
std::optional<BenchMethod> method_from_name(const std::string& name);

struct SweepConfig {
  std::vector<int> kernels{1, 3};
  std::vector<int> spatial{14, 28, 56, 104};
  std::vector<int> channels{64, 128, 256, 384, 512, 768, 1024};
  std::vector<std::pair<int, int>> bit_pairs{{1, 1}, {2, 2}, {3, 3}};
  std::vector<BenchMethod> methods{BenchMethod::bitserial, BenchMethod::f32_ref,
                                   BenchMethod::i8_ref,
                                   BenchMethod::winograd_ref};
  int repeats = 5;   // median over >= 3
  int warmup = 2;
  std::uint64_t seed = 0;
  double mem_budget_mb = 1024.0;

  void validate() const;
};

// One timed measurement. Grid points a method cannot run (over the memory
// budget, winograd on 1x1) produce a record with skipped=true; skipped
// records appear in the CSV as `# skipped ...` comment lines.
struct BenchRecord {
  std::string method;
  int kernel = 0;   // 1 or 3
  int spatial = 0;
  int channels = 0;
  int bits_a = 0;   // 0 on baseline rows
  int bits_w = 0;
  double median_seconds = 0.0;
  double gops = 0.0;
  std::optional<double> ratio_vs_best_baseline;  // bitserial rows only
  bool skipped = false;
  std::string skip_reason;
  std::uint64_t output_checksum = 0;  // not serialized; determinism checks
};

// Seconds-valued clock. The default is the steady clock unless BENCH_NO_TIME=1
// is set, which substitutes the deterministic fake clock below.
using ClockFn = std::function<double()>;
ClockFn steady_clock_fn();
ClockFn fake_clock(double step_seconds = 1e-3);

// Times every (kernel, S, C, method[, bit pair]) grid point: warmup runs,
// then `repeats` timed runs, median reported. Weight packing and filter
// transforms happen outside the timed region; activation quantize + lowering
// + pack run inside it. Single worker throughout. Inputs are generated from
// the seed (activation reals standard normal, weight levels uniform over
// range), so everything except wall time is deterministic.
std::vector<BenchRecord> run_sweep(const SweepConfig& cfg, ClockFn clock = {});

// CSV with the exact header
// method,kernel,spatial,channels,bits_a,bits_w,median_seconds,gops,ratio_vs_best_baseline
// followed by `# key=value` metadata comments; numbers at 9 significant
// digits, empty field for an absent ratio.
std::string csv_string(const std::vector<BenchRecord>& records);
void emit_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::vector<BenchRecord> parse_csv(std::istream& in);
std::vector<BenchRecord> parse_csv_file(const std::string& path);

// One text grid per (kernel, bit pair): rows C, columns S, cells the ratio of
// bitserial GOP/s to the best baseline GOP/s at that point, 2 decimals. Cells
// with no baseline render as an em dash.
std::string emit_ratio_grid(const std::vector<BenchRecord>& records);

}  // namespace bitserial
