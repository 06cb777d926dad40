#include "bitserial/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bitserial/errors.hpp"

namespace bitserial {

void ArchProfile::validate() const {
  if (!(f32_ops_per_cycle > 0.0) || !(i8_ops_per_cycle > 0.0) ||
      !(binary_ops_per_cycle > 0.0) || !(freq_ghz > 0.0))
    throw ConfigError("ArchProfile: all rates must be positive");
}

const ArchProfile& cortex_a7() {
  static const ArchProfile p{"cortex-a7", 2.0, 2.5, 42.0, 1.2};
  return p;
}

const ArchProfile& cortex_a53() {
  static const ArchProfile p{"cortex-a53", 8.0, 5.3, 85.0, 1.4};
  return p;
}

double speedup_bound(const ArchProfile& profile, int bits_a, int bits_w) {
  profile.validate();
  if (bits_a < 1 || bits_w < 1)
    throw ConfigError("speedup_bound: bit depths must be >= 1");
  const double best =
      std::max(profile.f32_ops_per_cycle, profile.i8_ops_per_cycle);
  return profile.binary_ops_per_cycle /
         (static_cast<double>(bits_a) * bits_w * best);
}

int max_bit_product(const ArchProfile& profile) {
  profile.validate();
  const double best =
      std::max(profile.f32_ops_per_cycle, profile.i8_ops_per_cycle);
  const double r = profile.binary_ops_per_cycle / best;
  int p = static_cast<int>(std::floor(r));
  // strict improvement required: P * best < binary rate
  while (p >= 1 && static_cast<double>(p) * best >= profile.binary_ops_per_cycle)
    --p;
  return std::max(p, 0);
}

double predicted_gops(const ArchProfile& profile, PeakMethod method) {
  profile.validate();
  switch (method) {
    case PeakMethod::f32:
      return profile.f32_ops_per_cycle * profile.freq_ghz;
    case PeakMethod::i8:
      return profile.i8_ops_per_cycle * profile.freq_ghz;
    case PeakMethod::binary:
      return profile.binary_ops_per_cycle * profile.freq_ghz;
  }
  throw ConfigError("predicted_gops: unknown method");
}

std::vector<ArchProfile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_profiles: cannot open " + path);
  std::vector<ArchProfile> profiles;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    ArchProfile p;
    if (!(ls >> p.name >> p.f32_ops_per_cycle >> p.i8_ops_per_cycle >>
          p.binary_ops_per_cycle >> p.freq_ghz))
      throw IoError("load_profiles: malformed line " + std::to_string(lineno) +
                    " in " + path);
    p.validate();
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::string model_table(const ArchProfile& profile) {
  profile.validate();
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "arch: %s (%.4g GHz)\n",
                profile.name.c_str(), profile.freq_ghz);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "ops/cycle: f32=%.4g  i8=%.4g  binary=%.4g\n",
                profile.f32_ops_per_cycle, profile.i8_ops_per_cycle,
                profile.binary_ops_per_cycle);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "peak GOP/s: f32=%.4g  i8=%.4g  binary=%.4g\n",
                predicted_gops(profile, PeakMethod::f32),
                predicted_gops(profile, PeakMethod::i8),
                predicted_gops(profile, PeakMethod::binary));
  out += buf;
  out += "speedup bound vs best baseline:\n";
  for (const auto [ba, bw] :
       {std::pair{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {4, 4}}) {
    std::snprintf(buf, sizeof(buf), "  %db x %db: %.4gx\n", ba, bw,
                  speedup_bound(profile, ba, bw));
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "break-even bit product: %d\n",
                max_bit_product(profile));
  out += buf;
  return out;
}

}  // namespace bitserial
