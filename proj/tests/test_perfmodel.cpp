#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bitserial/errors.hpp"
#include "bitserial/perfmodel.hpp"

using namespace bitserial;

TEST_CASE("built-in profiles carry the published rates") {
  const auto& a7 = cortex_a7();
  CHECK(a7.f32_ops_per_cycle == 2.0);
  CHECK(a7.i8_ops_per_cycle == 2.5);
  CHECK(a7.binary_ops_per_cycle == 42.0);
  CHECK(a7.freq_ghz == 1.2);
  const auto& a53 = cortex_a53();
  CHECK(a53.f32_ops_per_cycle == 8.0);
  CHECK(a53.i8_ops_per_cycle == 5.3);
  CHECK(a53.binary_ops_per_cycle == 85.0);
  CHECK(a53.freq_ghz == 1.4);
}

TEST_CASE("speedup bounds") {
  CHECK(speedup_bound(cortex_a7(), 1, 1) == doctest::Approx(16.8).epsilon(1e-12));
  CHECK(speedup_bound(cortex_a53(), 1, 1) ==
        doctest::Approx(10.625).epsilon(1e-12));
  // doubling both depths quarters the bound exactly
  for (const auto* p : {&cortex_a7(), &cortex_a53()})
    CHECK(speedup_bound(*p, 2, 2) ==
          doctest::Approx(speedup_bound(*p, 1, 1) / 4.0).epsilon(1e-12));
  CHECK_THROWS_AS(speedup_bound(cortex_a7(), 0, 1), ConfigError);
}

TEST_CASE("speedup bound depends only on the bit product") {
  for (const auto* p : {&cortex_a7(), &cortex_a53()}) {
    CHECK(speedup_bound(*p, 1, 4) == speedup_bound(*p, 2, 2));
    CHECK(speedup_bound(*p, 2, 3) == speedup_bound(*p, 3, 2));
    CHECK(speedup_bound(*p, 3, 3) < speedup_bound(*p, 2, 4));
  }
}

TEST_CASE("break-even bit products") {
  CHECK(max_bit_product(cortex_a7()) == 16);
  CHECK(max_bit_product(cortex_a53()) == 10);
  for (const auto* p : {&cortex_a7(), &cortex_a53()}) {
    const double best = std::max(p->f32_ops_per_cycle, p->i8_ops_per_cycle);
    const int mbp = max_bit_product(*p);
    CHECK(mbp * best < p->binary_ops_per_cycle);
    CHECK(p->binary_ops_per_cycle <= (mbp + 1) * best);
    CHECK(mbp >= 9);  // consistent with the measured ~9-plane break-even
  }
  // exact multiple: strictly-better requirement knocks it down one
  const ArchProfile even{"even", 5.0, 4.0, 50.0, 1.0};
  CHECK(max_bit_product(even) == 9);
}

TEST_CASE("predicted peak GOP/s") {
  CHECK(predicted_gops(cortex_a7(), PeakMethod::f32) ==
        doctest::Approx(2.4).epsilon(1e-12));
  CHECK(predicted_gops(cortex_a53(), PeakMethod::binary) ==
        doctest::Approx(119.0).epsilon(1e-12));
  // rates scale linearly with frequency
  ArchProfile fast = cortex_a7();
  fast.freq_ghz *= 3.0;
  for (auto m : {PeakMethod::f32, PeakMethod::i8, PeakMethod::binary})
    CHECK(predicted_gops(fast, m) ==
          doctest::Approx(3.0 * predicted_gops(cortex_a7(), m)).epsilon(1e-12));
}

TEST_CASE("profile files round-trip") {
  const auto path = std::filesystem::temp_directory_path() /
                    "bitserial_profiles_test.txt";
  {
    std::ofstream out(path);
    out << "# name f32 i8 binary ghz\n";
    out << "cortex-a7 2 2.5 42 1.2\n";
    out << "\n";
    out << "mything 4 6 96 2.0\n";
  }
  const auto profiles = load_profiles(path.string());
  REQUIRE(profiles.size() == 2);
  CHECK(profiles[0].name == "cortex-a7");
  CHECK(profiles[0].binary_ops_per_cycle == 42.0);
  CHECK(profiles[1].name == "mything");
  CHECK(profiles[1].freq_ghz == 2.0);
  CHECK(max_bit_product(profiles[1]) == 15);  // 96/6 = 16, strict -> 15
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_profiles("/nonexistent/profiles.txt"), IoError);
}

TEST_CASE("model table mentions the key numbers") {
  const std::string t = model_table(cortex_a53());
  CHECK(t.find("cortex-a53") != std::string::npos);
  CHECK(t.find("85") != std::string::npos);
  CHECK(t.find("10") != std::string::npos);
}
