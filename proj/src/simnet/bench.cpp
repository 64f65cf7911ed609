#include "hornet/simnet/bench.hpp"

#include <algorithm>
#include <chrono>

#include "hornet/detail/aes128.hpp"
#include "hornet/error.hpp"
#include "hornet/protocol.hpp"

namespace hornet::simnet {

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
Timing time_runs(std::size_t n, F&& op) {
  std::vector<double> ns(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t0 = Clock::now();
    op();
    ns[i] = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
  }
  std::sort(ns.begin(), ns.end());
  return {ns[n / 2], ns[std::min(n - 1, n * 95 / 100)], n};
}

}  // namespace

BenchReport bench(const BenchConfig& config) {
  if (config.data_iterations < 1000) {
    throw Error(ErrorCode::kInvalidArgument, "bench needs at least 1000 data iterations");
  }
  if (config.setup_iterations == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bench needs setup iterations");
  }
  if (config.hops < 1 || config.hops > kMaxHops) {
    throw Error(ErrorCode::kInvalidArgument, "hops must be in [1, r]");
  }
  crypto::init();
  Rng rng(config.seed);

  // A line S - 1 - ... - h - S' where the backward path is one extra node.
  const auto h = static_cast<std::uint32_t>(config.hops);
  const std::uint32_t source = 1000;
  const std::uint32_t back = 999;
  std::map<std::uint32_t, NodeState> net;
  for (std::uint32_t id = 1; id <= h; ++id) net[id] = NodeState::generate(id, rng);
  net[back] = NodeState::generate(back, rng);
  for (std::uint32_t id = 1; id <= h; ++id) {
    net[id].neighbors = {id - 1 == 0 ? source : id - 1, id + 1};
  }
  net[h].neighbors.push_back(back);
  net[back].neighbors = {h, source};

  SessionRequest req;
  req.source_id = source;
  for (std::uint32_t id = 1; id <= h; ++id) req.forward.push_back({id, net[id].dh_public, 0});
  req.backward.push_back({back, net[back].dh_public, 0});
  const ExpiryTime now{100000};
  req.exp = ExpiryTime{now.decaseconds + 60};
  req.payload_size = config.payload_size;
  PendingSetup pending = source_begin_setup(req, now, rng);

  BenchReport report;
  report.config = config;
  report.aes_backend = detail::active_aes_backend() == detail::AesBackend::kHardware
                           ? "aes-ni"
                           : "openssl";
  const SetupPacket& first = pending.outbound.packet;
  report.setup = time_runs(config.setup_iterations,
                           [&] { (void)node_process_setup(net[1], first, now); });

  SetupPacket p = first;
  std::uint32_t hop = pending.outbound.next_hop;
  while (hop != source) {
    SetupStep st = node_process_setup(net[hop], p, now);
    if (st.at_destination) st = dest_turnaround(net[hop], p, now);
    p = st.packet;
    hop = st.route.next_hop;
  }
  source_complete_setup(pending.session, p, rng);
  Bytes app(config.payload_size - 26, 0x5a);
  const OutboundData data = source_send_data(pending.session, app, now, rng);

  const std::uint64_t dh_before = crypto::counters().dh_calls.load();
  report.data = time_runs(config.data_iterations,
                          [&] { (void)node_process_data(net[1], data.packet, now); });
  report.data_dh_calls = crypto::counters().dh_calls.load() - dh_before;
  report.ratio = report.setup.median_ns / report.data.median_ns;
  return report;
}

nlohmann::json BenchReport::to_json() const {
  auto timing = [](const Timing& t) {
    return nlohmann::json{
        {"median_ns", t.median_ns}, {"p95_ns", t.p95_ns}, {"iterations", t.iterations}};
  };
  return {{"hops", config.hops},
          {"payload_size", config.payload_size},
          {"seed", config.seed},
          {"aes_backend", aes_backend},
          {"setup", timing(setup)},
          {"data", timing(data)},
          {"ratio", ratio},
          {"data_dh_calls", data_dh_calls}};
}

}  // namespace hornet::simnet
