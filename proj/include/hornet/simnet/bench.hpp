#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

namespace hornet::simnet {

struct BenchConfig {
  std::size_t hops = 7;
  std::size_t payload_size = 512;
  std::size_t data_iterations = 10000;  // at least 1000
  std::size_t setup_iterations = 200;
  std::uint64_t seed = 1;
};

struct Timing {
  double median_ns = 0;
  double p95_ns = 0;
  std::size_t iterations = 0;
};

struct BenchReport {
  BenchConfig config;
  Timing setup;  // node_process_setup at the first hop
  Timing data;   // node_process_data at the first hop
  double ratio = 0;  // setup median / data median
  std::uint64_t data_dh_calls = 0;
  const char* aes_backend = "";

  nlohmann::json to_json() const;
};

// Throws kInvalidArgument when data_iterations < 1000 or the setup
// iterations are zero.
BenchReport bench(const BenchConfig& config);

}  // namespace hornet::simnet
