// hornet: run scenarios, benchmarks, anonymity-set queries and golden-vector
// maintenance.
//
// Exit codes: 0 success, 1 validation or usage error (including a failed
// vector check), 2 invariant violation detected in a scenario run.

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hornet/simnet/anonset.hpp"
#include "hornet/simnet/bench.hpp"
#include "hornet/simnet/network.hpp"
#include "hornet/vectors.hpp"

namespace {

using nlohmann::json;
namespace sim = hornet::simnet;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kViolation = 2;

struct Options {
  bool json_out = false;
  int verbosity = 0;
  std::optional<std::uint64_t> seed;

  std::string scenario_file;
  std::string transcript_out;
  std::string hexdump_out;

  sim::BenchConfig bench;

  std::string topology_file;
  std::string adversary;
  std::string ingress;
  std::optional<unsigned> distance;

  std::string vectors_dir = "vectors";
};

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("HORNET_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const std::uint64_t seed = std::stoull(v, &used, 0);
    if (used != std::strlen(v)) throw std::invalid_argument(v);
    return seed;
  } catch (const std::exception&) {
    throw sim::ValidationError("HORNET_SEED", "not an integer");
  }
}

std::optional<std::uint64_t> effective_seed(const Options& o) {
  if (o.seed) return o.seed;
  return env_seed();
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sim::ValidationError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sim::ValidationError(path, e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sim::ValidationError(path, "cannot write file");
  out << text;
}

int run_scenario_cmd(const Options& o) {
  sim::Scenario sc = sim::Scenario::load(o.scenario_file);
  if (auto seed = effective_seed(o)) sc.seed = *seed;
  const sim::TranscriptReport report = sim::run_scenario(sc);
  const std::string transcript = report.to_json().dump(2) + "\n";
  if (!o.hexdump_out.empty()) {
    std::ofstream out(o.hexdump_out);
    if (!out) throw sim::ValidationError(o.hexdump_out, "cannot write file");
    report.write_hexdump(out);
  }
  if (o.transcript_out.empty()) {
    std::cout << transcript;
  } else {
    write_file(o.transcript_out, transcript);
    json summary{{"transcript", o.transcript_out},
                 {"all_delivered", report.all_delivered()},
                 {"violations", report.violations()},
                 {"drops", report.drops.size()}};
    if (o.json_out) {
      std::cout << summary.dump() << "\n";
    } else {
      std::cout << "sessions complete: " << (report.all_delivered() ? "yes" : "no")
                << "\ndrops: " << report.drops.size()
                << "\ninvariant violations: " << report.violations() << "\n";
    }
  }
  if (o.verbosity > 0) {
    for (const auto& d : report.drops) {
      std::cerr << "drop at " << d.node << " (from " << d.from << ", tick " << d.tick
                << "): " << d.error << "\n";
    }
  }
  for (const auto& inv : report.invariants) {
    for (const auto& detail : inv.details) std::cerr << inv.name << ": " << detail << "\n";
  }
  return report.violations() == 0 ? kOk : kViolation;
}

int bench_cmd(const Options& o) {
  sim::BenchConfig cfg = o.bench;
  if (auto seed = effective_seed(o)) cfg.seed = *seed;
  const sim::BenchReport r = sim::bench(cfg);
  if (o.json_out) {
    std::cout << r.to_json().dump(2) << "\n";
  } else {
    std::cout << "setup per node: median " << r.setup.median_ns / 1000 << " us, p95 "
              << r.setup.p95_ns / 1000 << " us (" << r.setup.iterations << " runs)\n"
              << "data per node:  median " << r.data.median_ns << " ns, p95 " << r.data.p95_ns
              << " ns (" << r.data.iterations << " runs)\n"
              << "ratio: " << r.ratio << "\n"
              << "group operations on the data path: " << r.data_dh_calls << "\n";
  }
  return kOk;
}

int anonset_cmd(const Options& o) {
  json j = read_json(o.topology_file);
  if (j.is_object() && j.contains("topology")) j = j["topology"];
  const sim::Topology topo = sim::Topology::from_json(j, o.topology_file);
  sim::AnonymitySet set;
  try {
    set = sim::anonymity_set(topo, o.adversary, o.ingress, o.distance);
  } catch (const hornet::Error& e) {
    throw sim::ValidationError("--ingress", e.what());
  }
  if (o.json_out) {
    json out{{"adversary", o.adversary},
             {"ingress", o.ingress},
             {"weight", set.weight},
             {"members", set.members}};
    out["distance"] = o.distance ? json(*o.distance) : json(nullptr);
    std::cout << out.dump() << "\n";
  } else {
    std::cout << set.weight << "\n";
    if (o.verbosity > 0) {
      for (const auto& m : set.members) std::cerr << m << " " << topo.weight(m) << "\n";
    }
  }
  return kOk;
}

int vectors_gen_cmd(const Options& o) {
  hornet::vectors::write_all(o.vectors_dir);
  if (o.json_out) {
    std::cout << json{{"dir", o.vectors_dir}, {"written", true}}.dump() << "\n";
  } else {
    std::cout << "wrote vectors to " << o.vectors_dir << "\n";
  }
  return kOk;
}

int vectors_check_cmd(const Options& o) {
  const auto results = hornet::vectors::check_all(o.vectors_dir);
  std::size_t failed = 0;
  json list = json::array();
  for (const auto& r : results) {
    if (!r.ok) {
      ++failed;
      std::cerr << r.file << " " << r.blob << ": " << r.detail << "\n";
    }
    list.push_back({{"file", r.file}, {"blob", r.blob}, {"ok", r.ok}, {"detail", r.detail}});
  }
  if (o.json_out) {
    std::cout << json{{"checked", results.size()}, {"failed", failed}, {"results", list}}.dump()
              << "\n";
  } else {
    std::cout << results.size() - failed << "/" << results.size() << " vectors match\n";
  }
  return failed == 0 ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HORNET reference implementation tools"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json_out, "Machine-readable JSON on standard output");
  app.add_flag("-v,--verbose", o.verbosity, "More diagnostics on standard error");
  app.add_option("--seed", o.seed, "Seed override (takes precedence over HORNET_SEED)");

  int code = kOk;
  auto* scenario = app.add_subcommand("scenario", "Scenario files");
  scenario->require_subcommand(1);
  auto* run = scenario->add_subcommand("run", "Run a scenario and emit its transcript");
  run->add_option("file", o.scenario_file, "Scenario JSON")->required();
  run->add_option("-o,--out", o.transcript_out, "Write the transcript here instead of stdout");
  run->add_option("--hexdump", o.hexdump_out, "Write recorded packets as hex dumps");
  run->callback([&] { code = run_scenario_cmd(o); });

  auto* bench = app.add_subcommand("bench", "Per-node processing time, setup vs data");
  bench->add_option("--iters", o.bench.data_iterations, "Data-packet iterations (>= 1000)");
  bench->add_option("--setup-iters", o.bench.setup_iterations, "Setup-packet iterations");
  bench->add_option("--hops", o.bench.hops, "Forward path length");
  bench->add_option("--payload", o.bench.payload_size, "Onion payload size in bytes");
  bench->callback([&] { code = bench_cmd(o); });

  auto* anonset = app.add_subcommand("anonset", "Weighted anonymity-set size");
  anonset->add_option("topology", o.topology_file, "Topology or scenario JSON")->required();
  anonset->add_option("--adversary", o.adversary, "Adversary node")->required();
  anonset->add_option("--ingress", o.ingress, "Neighbour the packet arrived from")->required();
  anonset->add_option("--distance", o.distance, "Known hop distance to the source");
  anonset->callback([&] { code = anonset_cmd(o); });

  auto* vectors = app.add_subcommand("vectors", "Golden wire vectors");
  vectors->require_subcommand(1);
  vectors->add_option("--dir", o.vectors_dir, "Vector directory")->capture_default_str();
  auto* gen = vectors->add_subcommand("gen", "Regenerate the vector files")->fallthrough();
  gen->callback([&] { code = vectors_gen_cmd(o); });
  auto* check =
      vectors->add_subcommand("check", "Compare committed vectors with the code")->fallthrough();
  check->callback([&] { code = vectors_check_cmd(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  } catch (const sim::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kInvalid;
  } catch (const hornet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return code;
}
