#include "bitserial/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "bitserial/errors.hpp"

namespace bitserial {

void QuantParams::validate() const {
  if (bits < 1 || bits > 8)
    throw ConfigError("QuantParams: bits must be in 1..8");
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(offset))
    throw ConfigError("QuantParams: scale must be positive and finite");
}

std::uint8_t quantize_value(float v, const QuantParams& params) {
  if (!std::isfinite(v))
    throw DomainError("quantize: non-finite input value");
  const double t = (static_cast<double>(v) - params.offset) / params.scale;
  const double r = std::round(t);  // half away from zero
  const double c = std::clamp(r, 0.0, static_cast<double>(params.max_level()));
  return static_cast<std::uint8_t>(c);
}

LevelMatrix quantize_uniform(const MatrixF& values, const QuantParams& params) {
  params.validate();
  LevelMatrix out(values.rows(), values.cols(), params.bits);
  for (std::size_t i = 0; i < values.size(); ++i)
    out.levels[i] = quantize_value(values.data()[i], params);
  return out;
}

MatrixF dequantize(const LevelMatrix& levels, const QuantParams& params) {
  params.validate();
  if (levels.bits != params.bits)
    throw ShapeError("dequantize: level bits do not match params bits");
  MatrixF out(levels.rows, levels.cols);
  for (std::size_t i = 0; i < levels.levels.size(); ++i)
    out.data()[i] = static_cast<float>(params.dequantize_level(levels.levels[i]));
  return out;
}

namespace {

double empirical_mse(std::span<const float> samples, const QuantParams& p) {
  double acc = 0.0;
  for (float s : samples) {
    const double d = s - p.dequantize_level(quantize_value(s, p));
    acc += d * d;
  }
  return acc / static_cast<double>(samples.size());
}

}  // namespace

QuantFit fit_uniform_quantizer(std::span<const float> samples, int bits,
                               int max_iters) {
  if (bits < 1 || bits > 8)
    throw ConfigError("fit_uniform_quantizer: bits must be in 1..8");
  if (samples.empty())
    throw DomainError("fit_uniform_quantizer: empty sample set");
  for (float s : samples)
    if (!std::isfinite(s))
      throw DomainError("fit_uniform_quantizer: non-finite sample");

  std::vector<float> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double mn = sorted.front();
  const double mx = sorted.back();
  if (mn == mx)
    throw DomainError(
        "fit_uniform_quantizer: all samples equal, scale would be zero");

  const int top = (1 << bits) - 1;

  // Start at the nonnegative sample floor with the 99th-percentile span;
  // heavy-tail clipping keeps the top level off outliers. The fallbacks only
  // trigger for mostly-negative data, where the alternation then relocates
  // the offset on its own.
  const std::size_t p99 =
      static_cast<std::size_t>(std::llround(0.99 * (sorted.size() - 1)));
  double offset = std::max(0.0, mn);
  double scale = (sorted[p99] - offset) / top;
  if (!(scale > 0.0)) scale = (mx - offset) / top;
  if (!(scale > 0.0)) {
    offset = mn;
    scale = (mx - mn) / top;
  }

  QuantParams p{bits, offset, scale};
  QuantFit fit;
  std::vector<std::uint8_t> assign(samples.size());
  std::vector<std::uint8_t> prev;
  for (int iter = 0; iter < max_iters; ++iter) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      assign[i] = quantize_value(samples[i], p);
    if (assign == prev) break;

    // Least squares of samples on assigned levels: s ~ offset + scale * L.
    const double n = static_cast<double>(samples.size());
    double sum_l = 0.0, sum_ll = 0.0, sum_s = 0.0, sum_ls = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double l = assign[i];
      const double s = samples[i];
      sum_l += l;
      sum_ll += l * l;
      sum_s += s;
      sum_ls += l * s;
    }
    const double det = n * sum_ll - sum_l * sum_l;
    if (!(det > 0.0)) break;  // every sample on one level; nothing to solve
    const double new_scale = (n * sum_ls - sum_l * sum_s) / det;
    if (!(new_scale > 0.0)) break;
    p.scale = new_scale;
    p.offset = (sum_s - new_scale * sum_l) / n;

    fit.mse_history.push_back(empirical_mse(samples, p));
    prev = assign;
  }

  p.validate();
  fit.params = p;
  return fit;
}

}  // namespace bitserial
