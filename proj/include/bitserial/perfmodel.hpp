#pragma once

#include <string>
#include <vector>

namespace bitserial {

// Per-microarchitecture instruction budgets: sustained ops/cycle for the
// float32, int8 and binary (xor+popcount) inner loops, plus the clock.
struct ArchProfile {
  std::string name;
  double f32_ops_per_cycle = 0.0;
  double i8_ops_per_cycle = 0.0;
  double binary_ops_per_cycle = 0.0;
  double freq_ghz = 0.0;

  void validate() const;  // ConfigError unless all rates are positive
};

const ArchProfile& cortex_a7();   // {2, 2.5, 42, 1.2}
const ArchProfile& cortex_a53();  // {8, 5.3, 85, 1.4}

// Idealized speedup of a bits_a x bits_w bitserial kernel over the best
// conventional baseline: an {n,m}-bit product costs n*m binary inner
// products, so the bound is binary_rate / (bits_a * bits_w * max(f32, i8)).
double speedup_bound(const ArchProfile& profile, int bits_a, int bits_w);

// Largest bit product P whose predicted bitserial throughput still strictly
// beats the best baseline rate.
int max_bit_product(const ArchProfile& profile);

enum class PeakMethod { f32, i8, binary };

// Theoretical peak in GOP/s: ops-per-cycle * GHz.
double predicted_gops(const ArchProfile& profile, PeakMethod method);

// Loads profiles from a text file, one per line:
//   name f32_ops_per_cycle i8_ops_per_cycle binary_ops_per_cycle freq_ghz
// Blank lines and lines starting with '#' are skipped.
std::vector<ArchProfile> load_profiles(const std::string& path);

// Printable summary: rates, peaks, speedup bounds and the break-even bit
// product for one profile.
std::string model_table(const ArchProfile& profile);

}  // namespace bitserial
