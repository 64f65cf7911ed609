#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "hornet/ahdr.hpp"
#include "hornet/error.hpp"
#include "hornet/onion.hpp"
#include "hornet/simnet/anonset.hpp"
#include "hornet/simnet/bench.hpp"
#include "hornet/simnet/network.hpp"
#include "hornet/wire.hpp"

namespace py = pybind11;
using namespace hornet;

namespace {

std::string as_str(ByteSpan b) { return std::string(reinterpret_cast<const char*>(b.data()), b.size()); }

py::bytes to_py(ByteSpan b) { return py::bytes(as_str(b)); }

Bytes from_py(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

template <std::size_t N>
ByteArray<N> fixed(const py::bytes& b, const char* what) {
  const std::string s = b;
  if (s.size() != N) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be " + std::to_string(N) + " bytes");
  }
  ByteArray<N> out;
  std::memcpy(out.data(), s.data(), N);
  return out;
}

SymKey key_of(const py::bytes& b) { return {fixed<kKeySize>(b, "key")}; }

SubkeyLabel label_of(const std::string& name) {
  static const std::pair<const char*, SubkeyLabel> names[] = {
      {"mac", SubkeyLabel::kMac}, {"prg0", SubkeyLabel::kPrg0}, {"prg1", SubkeyLabel::kPrg1},
      {"prg2", SubkeyLabel::kPrg2}, {"prp", SubkeyLabel::kPrp}, {"enc", SubkeyLabel::kEnc},
      {"dec", SubkeyLabel::kDec}};
  for (const auto& [n, l] : names) {
    if (name == n) return l;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown subkey label " + name);
}

py::dict opened_dict(const SymKey& key, const RoutingSegment& r, ExpiryTime exp) {
  py::dict d;
  d["key"] = to_py(key.bytes);
  d["next_hop"] = r.next_hop;
  d["egress_link"] = r.egress_link;
  d["flags"] = r.flags;
  d["exp"] = exp.decaseconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hornet, m) {
  m.doc() = "HORNET onion routing: primitives, header formats and the simulator";
  crypto::init();

  static py::exception<Error> hornet_error(m, "HornetError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(hornet_error)(e.what());
      inst.attr("code") = error_code_name(e.code());
      PyErr_SetObject(hornet_error.ptr(), inst.ptr());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.attr("KEY_SIZE") = kKeySize;
  m.attr("MAX_HOPS") = kMaxHops;
  m.attr("AHDR_SIZE") = kAhdrSize;
  m.attr("NESTED_AHDR_SIZE") = kNestedAhdrSize;
  m.attr("SETUP_PACKET_SIZE") = kSetupPacketSize;
  m.attr("DATA_HEADER_SIZE") = kDataHeaderSize;

  m.def("derive_subkey", [](const py::bytes& key, const std::string& label) {
    return to_py(crypto::derive_subkey(key_of(key), label_of(label)).bytes);
  });
  m.def("mac", [](const py::bytes& key, const py::bytes& data) {
    return to_py(crypto::mac(key_of(key), from_py(data)));
  });
  m.def("prg", [](const py::bytes& key, int variant, std::size_t n) {
    if (variant < 0 || variant > 2) throw Error(ErrorCode::kInvalidArgument, "variant 0, 1 or 2");
    return to_py(crypto::prg(key_of(key), static_cast<PrgVariant>(variant), n));
  });
  m.def(
      "prp",
      [](const py::bytes& key, const py::bytes& block, bool inverse) {
        return to_py(crypto::prp_wide(key_of(key), from_py(block),
                                      inverse ? PrpDirection::kInverse : PrpDirection::kForward));
      },
      py::arg("key"), py::arg("block"), py::arg("inverse") = false);
  m.def("stream_xcrypt", [](const py::bytes& key, const py::bytes& iv, const py::bytes& data) {
    return to_py(crypto::stream_xcrypt(key_of(key), fixed<kIvSize>(iv, "iv"), from_py(data),
                                       CipherDirection::kEncrypt));
  });
  m.def("hash_to_key", [](const std::string& context, const py::bytes& data) {
    return to_py(crypto::hash_to_key(context, from_py(data)).bytes);
  });

  m.def(
      "fs_create",
      [](const py::bytes& sv, const py::bytes& key, std::uint32_t next_hop,
         std::uint16_t egress_link, std::uint16_t flags, std::uint32_t exp) {
        return to_py(
            fs_create(key_of(sv), key_of(key), {next_hop, egress_link, flags}, {exp}).sealed);
      },
      py::arg("sv"), py::arg("key"), py::arg("next_hop"), py::arg("egress_link") = 0,
      py::arg("flags") = 0, py::arg("exp"));
  m.def("fs_open", [](const py::bytes& sv, const py::bytes& fs) {
    const OpenedSegment o = fs_open(key_of(sv), {fixed<kFsSize>(fs, "fs")});
    return opened_dict(o.key, o.route, o.exp);
  });

  m.def("create_ahdr", [](const std::vector<py::bytes>& keys, const std::vector<py::bytes>& fses,
                          std::uint64_t seed) {
    std::vector<SymKey> k;
    std::vector<ForwardingSegment> f;
    for (const auto& b : keys) k.push_back(key_of(b));
    for (const auto& b : fses) f.push_back({fixed<kFsSize>(b, "fs")});
    Rng rng(seed);
    return to_py(create_ahdr(k, f, rng).bytes);
  });
  m.def("proc_ahdr", [](const py::bytes& sv, const py::bytes& header, std::uint32_t now) {
    const AhdrStep st = proc_ahdr(key_of(sv), {fixed<kAhdrSize>(header, "header")}, {now});
    py::dict d = opened_dict(st.key, st.route, st.exp);
    d["next"] = to_py(st.next.bytes);
    return d;
  });

  m.def("add_layer", [](const py::bytes& key, const py::bytes& iv, const py::bytes& payload) {
    const LayerResult r = add_layer(key_of(key), {fixed<kIvSize>(iv, "iv")}, from_py(payload));
    return py::make_tuple(to_py(r.payload), to_py(r.iv.bytes));
  });
  m.def("remove_layer", [](const py::bytes& key, const py::bytes& iv, const py::bytes& payload) {
    const LayerResult r = remove_layer(key_of(key), {fixed<kIvSize>(iv, "iv")}, from_py(payload));
    return py::make_tuple(to_py(r.payload), to_py(r.iv.bytes));
  });

  m.def("packet_info", [](const py::bytes& raw) {
    const Packet p = decode(from_py(raw));
    py::dict d;
    if (const auto* s = std::get_if<SetupPacket>(&p)) {
      d["kind"] = s->chdr.type == PacketType::kSetupForward ? "setup-forward" : "setup-backward";
      d["exp"] = s->chdr.exp.decaseconds;
    } else {
      const auto& data = std::get<DataPacket>(p);
      d["kind"] = data.chdr.type == PacketType::kDataForward ? "data-forward" : "data-backward";
      d["nested"] = data.nested();
      d["payload_size"] = data.payload.size();
    }
    return d;
  });

  m.def("_run_scenario", [](const std::string& text, const std::string& base_dir,
                            std::optional<std::uint64_t> seed) {
    simnet::Scenario sc = simnet::Scenario::from_json(nlohmann::json::parse(text), base_dir);
    if (seed) sc.seed = *seed;
    py::gil_scoped_release release;
    return simnet::run_scenario(sc).to_json().dump();
  });
  m.def("_anonymity_set", [](const std::string& topology, const std::string& adversary,
                             const std::string& ingress, std::optional<unsigned> distance,
                             bool brute_force) {
    const auto topo = simnet::Topology::from_json(nlohmann::json::parse(topology));
    const auto set = brute_force
                         ? simnet::anonymity_set_brute_force(topo, adversary, ingress, distance)
                         : simnet::anonymity_set(topo, adversary, ingress, distance);
    return py::make_tuple(set.weight, set.members);
  });
  m.def("_bench", [](std::size_t hops, std::size_t payload, std::size_t data_iterations,
                     std::size_t setup_iterations, std::uint64_t seed) {
    simnet::BenchConfig cfg{hops, payload, data_iterations, setup_iterations, seed};
    py::gil_scoped_release release;
    return simnet::bench(cfg).to_json().dump();
  });
}
