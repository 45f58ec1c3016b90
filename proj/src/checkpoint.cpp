#include "covrank/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "covrank/error.hpp"

namespace covrank {

namespace {

constexpr char kMagic[8] = {'C', 'V', 'R', 'K', 'C', 'K', 'P', 'T'};

template <class T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <class T>
T get_le(std::istream& in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == EOF) fail(ErrorKind::data, "checkpoint: truncated file");
    value |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
  return std::filesystem::path(base.string() + suffix);
}

}  // namespace

nlohmann::json spec_to_json(const NetworkSpec& spec) {
  return {{"input", spec.input},     {"reduce_axis1", spec.reduce_axis1}, {"conv", spec.conv},
          {"filters", spec.filters}, {"core_h", spec.core_h},             {"core_w", spec.core_w},
          {"out_len", spec.out_len}, {"head", spec.head}};
}

NetworkSpec spec_from_json(const nlohmann::json& j) {
  NetworkSpec s;
  s.input = j.at("input").get<Shape>();
  s.reduce_axis1 = j.at("reduce_axis1").get<bool>();
  s.conv = j.at("conv").get<bool>();
  s.filters = j.at("filters").get<std::size_t>();
  s.core_h = j.at("core_h").get<std::size_t>();
  s.core_w = j.at("core_w").get<std::size_t>();
  s.out_len = j.at("out_len").get<std::size_t>();
  s.head = j.at("head").get<bool>();
  return s;
}

void save_checkpoint(const std::filesystem::path& base, const Network& net, const nlohmann::json& meta) {
  const std::vector<double> params = net.flat_parameters();
  {
    std::ofstream out(with_suffix(base, ".bin"), std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::data, "checkpoint: cannot write " + with_suffix(base, ".bin").string());
    out.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(out, kCheckpointVersion);
    put_le<std::uint32_t>(out, 0);
    put_le<std::uint64_t>(out, params.size());
    for (double v : params) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    if (!out) fail(ErrorKind::data, "checkpoint: write failed");
  }
  nlohmann::json side = {{"format", "covrank-checkpoint/v1"},
                         {"version", kCheckpointVersion},
                         {"parameters", params.size()},
                         {"spec", spec_to_json(net.spec())},
                         {"meta", meta}};
  std::ofstream js(with_suffix(base, ".json"), std::ios::trunc);
  if (!js) fail(ErrorKind::data, "checkpoint: cannot write " + with_suffix(base, ".json").string());
  js << side.dump(2) << "\n";
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& base) {
  std::ifstream js(with_suffix(base, ".json"));
  if (!js) fail(ErrorKind::data, "checkpoint: missing sidecar " + with_suffix(base, ".json").string());
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(js);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, std::string("checkpoint: malformed sidecar: ") + e.what());
  }
  Network net(spec_from_json(side.at("spec")), 0);

  std::ifstream in(with_suffix(base, ".bin"), std::ios::binary);
  if (!in) fail(ErrorKind::data, "checkpoint: missing " + with_suffix(base, ".bin").string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) fail(ErrorKind::data, "checkpoint: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    fail(ErrorKind::data, "checkpoint: unsupported version " + std::to_string(version));
  }
  (void)get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  if (count != net.parameter_count()) {
    fail(ErrorKind::data, "checkpoint: parameter count " + std::to_string(count) + " does not match layout (" +
                              std::to_string(net.parameter_count()) + ")");
  }
  std::vector<double> params(count);
  for (auto& v : params) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  net.set_flat_parameters(params);
  return {std::move(net), side.value("meta", nlohmann::json::object())};
}

}  // namespace covrank
