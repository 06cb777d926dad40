// Benchmark CLI: `bench sweep` times the layer-shape grid and writes CSV,
// `bench ratio` renders the ratio grid from a CSV, `bench model` prints the
// analytical throughput tables.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitserial/bench.hpp"
#include "bitserial/errors.hpp"
#include "bitserial/perfmodel.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const auto& tok : split_commas(s)) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw bitserial::ConfigError(std::string("bad ") + what + ": " + tok);
    }
  }
  return out;
}

std::vector<int> parse_kernels(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split_commas(s)) {
    if (tok == "1x1")
      out.push_back(1);
    else if (tok == "3x3")
      out.push_back(3);
    else
      throw bitserial::ConfigError("bad kernel (want 1x1 or 3x3): " + tok);
  }
  return out;
}

std::vector<std::pair<int, int>> parse_bit_pairs(const std::string& s) {
  std::vector<std::pair<int, int>> out;
  for (const auto& tok : split_commas(s)) {
    const auto x = tok.find('x');
    if (x == std::string::npos)
      throw bitserial::ConfigError("bad bit pair (want AxW, e.g. 2x2): " + tok);
    try {
      out.emplace_back(std::stoi(tok.substr(0, x)),
                       std::stoi(tok.substr(x + 1)));
    } catch (const std::exception&) {
      throw bitserial::ConfigError("bad bit pair: " + tok);
    }
  }
  return out;
}

std::vector<bitserial::BenchMethod> parse_methods(const std::string& s) {
  std::vector<bitserial::BenchMethod> out;
  for (const auto& tok : split_commas(s)) {
    const auto m = bitserial::method_from_name(tok);
    if (!m) throw bitserial::ConfigError("unknown method: " + tok);
    out.push_back(*m);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitserial convolution benchmark harness"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "time the layer-shape grid");
  std::string kernels = "1x1,3x3";
  std::string spatial = "14,28,56,104";
  std::string channels = "64,128,256,384,512,768,1024";
  std::string bits = "1x1,2x2,3x3";
  std::string methods = "bitserial,f32_ref,i8_ref,winograd_ref";
  int repeats = 5, warmup = 2;
  std::uint64_t seed = 0;
  double mem_budget_mb = 1024.0;
  std::string out_path;
  sweep->add_option("--kernels", kernels, "kernel sizes, e.g. 1x1,3x3");
  sweep->add_option("--spatial", spatial, "spatial sizes S");
  sweep->add_option("--channels", channels, "channel counts C");
  sweep->add_option("--bits", bits, "bitserial bit pairs, e.g. 1x1,2x2");
  sweep->add_option("--methods", methods, "methods to time");
  sweep->add_option("--repeats", repeats, "timed runs per point (median)");
  sweep->add_option("--warmup", warmup, "untimed runs per point");
  sweep->add_option("--seed", seed, "input generation seed");
  sweep->add_option("--mem-budget-mb", mem_budget_mb,
                    "skip grid points whose working set exceeds this");
  sweep->add_option("--out", out_path, "output CSV path")->required();

  // ratio
  auto* ratio = app.add_subcommand("ratio", "render the ratio grid from CSV");
  std::string in_path;
  ratio->add_option("--in", in_path, "input CSV path")->required();

  // model
  auto* model = app.add_subcommand("model", "print throughput model tables");
  std::string arch;
  model->add_option("--arch", arch, "a7, a53, or a profile file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      bitserial::SweepConfig cfg;
      cfg.kernels = parse_kernels(kernels);
      cfg.spatial = parse_int_list(spatial, "spatial size");
      cfg.channels = parse_int_list(channels, "channel count");
      cfg.bit_pairs = parse_bit_pairs(bits);
      cfg.methods = parse_methods(methods);
      cfg.repeats = repeats;
      cfg.warmup = warmup;
      cfg.seed = seed;
      cfg.mem_budget_mb = mem_budget_mb;
      const auto records = bitserial::run_sweep(cfg);
      bitserial::emit_csv(records, out_path);
      std::size_t timed = 0, skipped = 0;
      for (const auto& r : records) (r.skipped ? skipped : timed)++;
      std::printf("wrote %zu records (%zu skipped) to %s\n", timed, skipped,
                  out_path.c_str());
    } else if (ratio->parsed()) {
      const auto records = bitserial::parse_csv_file(in_path);
      std::cout << bitserial::emit_ratio_grid(records);
    } else if (model->parsed()) {
      if (arch == "a7") {
        std::cout << bitserial::model_table(bitserial::cortex_a7());
      } else if (arch == "a53") {
        std::cout << bitserial::model_table(bitserial::cortex_a53());
      } else {
        for (const auto& p : bitserial::load_profiles(arch))
          std::cout << bitserial::model_table(p) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
