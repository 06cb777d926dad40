#include <doctest.h>

#include <cmath>
#include <random>

#include "bitserial/errors.hpp"
#include "bitserial/quantize.hpp"
#include "oracles.hpp"

using namespace bitserial;

namespace {

MatrixF single(float v) {
  MatrixF m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

TEST_CASE("quantize_uniform basics") {
  const QuantParams p{2, 0.0, 1.0};
  CHECK(quantize_uniform(single(2.4f), p).at(0, 0) == 2);
  CHECK(quantize_uniform(single(7.0f), p).at(0, 0) == 3);   // clamp at top
  CHECK(quantize_uniform(single(-1.0f), p).at(0, 0) == 0);  // clamp at bottom
  CHECK(quantize_uniform(single(-1.0f), QuantParams{4, 0.5, 0.25}).at(0, 0) ==
        0);
  // ties round away from zero
  CHECK(quantize_uniform(single(2.5f), p).at(0, 0) == 3);
  CHECK(quantize_uniform(single(1.5f), p).at(0, 0) == 2);
}

TEST_CASE("quantize rejects non-finite values") {
  const QuantParams p{2, 0.0, 1.0};
  CHECK_THROWS_AS(quantize_uniform(single(NAN), p), DomainError);
  CHECK_THROWS_AS(quantize_uniform(single(INFINITY), p), DomainError);
}

TEST_CASE("QuantParams validation") {
  CHECK_THROWS_AS((QuantParams{0, 0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((QuantParams{9, 0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((QuantParams{2, 0.0, 0.0}.validate()), ConfigError);
  CHECK_THROWS_AS((QuantParams{2, 0.0, -1.0}.validate()), ConfigError);
  CHECK_NOTHROW((QuantParams{2, -3.0, 0.5}.validate()));
}

TEST_CASE("bipolar encoding") {
  CHECK(kBipolar.bits == 1);
  CHECK(kBipolar.dequantize_level(0) == -1.0);
  CHECK(kBipolar.dequantize_level(1) == +1.0);
  // threshold sits at zero: v >= 0 -> level 1
  CHECK(quantize_value(0.0f, kBipolar) == 1);
  CHECK(quantize_value(3.5f, kBipolar) == 1);
  CHECK(quantize_value(-1e-3f, kBipolar) == 0);
  CHECK(quantize_value(-10.0f, kBipolar) == 0);
}

TEST_CASE("dequantize basics and errors") {
  LevelMatrix lv(1, 2, 1);
  lv.at(0, 0) = 0;
  lv.at(0, 1) = 1;
  const MatrixF d = dequantize(lv, kBipolar);
  CHECK(d(0, 0) == -1.0f);
  CHECK(d(0, 1) == +1.0f);
  CHECK_THROWS_AS(dequantize(lv, QuantParams{2, 0.0, 1.0}), ShapeError);
}

TEST_CASE("round trip stays within half a step") {
  std::mt19937_64 rng(7);
  for (int bits : {1, 2, 3, 4, 8}) {
    const QuantParams p{bits, -0.5, 0.37};
    const MatrixF x = oracles::rand_normal(6, 40, rng, 2.0f);
    const MatrixF rt = dequantize(quantize_uniform(x, p), p);
    const double lo = p.offset;
    const double hi = p.offset + p.scale * p.max_level();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double clamped = std::min(std::max(double(x.data()[i]), lo), hi);
      CHECK(std::abs(rt.data()[i] - clamped) <= p.scale / 2 + 1e-12);
    }
  }
}

TEST_CASE("quantization is monotone and idempotent on lattice points") {
  std::mt19937_64 rng(11);
  const QuantParams p{3, -1.0, 0.3};
  std::uniform_real_distribution<float> dist(-3.0f, 3.0f);
  for (int t = 0; t < 500; ++t) {
    float v1 = dist(rng), v2 = dist(rng);
    if (v1 > v2) std::swap(v1, v2);
    CHECK(quantize_value(v1, p) <= quantize_value(v2, p));
  }
  for (int l = 0; l <= p.max_level(); ++l)
    CHECK(quantize_value(static_cast<float>(p.dequantize_level(l)), p) == l);
}

TEST_CASE("fit recovers exact lattices") {
  {
    const std::vector<float> s{0.0f, 1.0f};
    const auto fit = fit_uniform_quantizer(s, 1, 50);
    CHECK(fit.params.offset == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.params.scale == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    const std::vector<float> s{0.0f, 1.0f, 2.0f, 3.0f};
    const auto fit = fit_uniform_quantizer(s, 2, 50);
    CHECK(fit.params.offset == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.params.scale == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(oracles::quantizer_mse(s, fit.params.offset, fit.params.scale, 2) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("fit rejects degenerate input") {
  const std::vector<float> same(10, 2.5f);
  CHECK_THROWS_AS(fit_uniform_quantizer(same, 2, 10), DomainError);
  CHECK_THROWS_AS(fit_uniform_quantizer({}, 2, 10), DomainError);
  const std::vector<float> bad{1.0f, NAN};
  CHECK_THROWS_AS(fit_uniform_quantizer(bad, 2, 10), DomainError);
}

TEST_CASE("fit MSE is monotone non-increasing on random sample sets") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<float> samples(2000);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    for (auto& s : samples) s = std::abs(dist(rng));
    const auto fit = fit_uniform_quantizer(samples, 2 + rep % 3, 40);
    REQUIRE(!fit.mse_history.empty());
    for (std::size_t i = 1; i < fit.mse_history.size(); ++i)
      CHECK(fit.mse_history[i] <=
            fit.mse_history[i - 1] * (1.0 + 1e-9) + 1e-15);
  }
}

TEST_CASE("fit on half-Gaussian samples lands near the grid-search optimum") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> samples(100000);
  for (auto& s : samples) s = std::abs(dist(rng));

  const auto fit = fit_uniform_quantizer(samples, 2, 60);
  const auto grid = oracles::grid_search_fit(samples, 2, 0.0, 0.5, 0.005, 0.1,
                                             1.5, 0.01);
  // params within 5% of the grid optimum, fitted MSE at least as good up to 5%
  CHECK(std::abs(fit.params.offset - grid.offset) <=
        0.05 * std::max(std::abs(grid.offset), 0.1));
  CHECK(std::abs(fit.params.scale - grid.scale) <= 0.05 * grid.scale);
  const double fit_mse = oracles::quantizer_mse(samples, fit.params.offset,
                                                fit.params.scale, 2);
  CHECK(fit_mse <= 1.05 * grid.mse);
}
