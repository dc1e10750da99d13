#include "stabkit/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "stabkit/core/error.hpp"
#include "stabkit/core/sha256.hpp"

namespace stabkit::nn {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'S', 'T', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

template <class V>
void put(std::string& out, V v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <class V>
V take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(V) > in.size()) throw FormatError("parameter blob truncated");
  V v;
  std::memcpy(&v, in.data() + pos, sizeof(V));
  pos += sizeof(V);
  return v;
}

std::string digest(const std::string& blob) {
  Sha256 sha;
  sha.update({reinterpret_cast<const std::uint8_t*>(blob.data()), blob.size()});
  return sha.hex_digest();
}

nlohmann::json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "checkpoint.json");
  if (!in) throw IoError("cannot open checkpoint manifest in " + dir.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint manifest: ") + e.what());
  }
}

}  // namespace

void save_checkpoint(const fs::path& dir, Generator<float>& net, const CheckpointInfo& info) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::string blob(kMagic, sizeof(kMagic));
  put(blob, kVersion);
  const auto params = net.params();
  put(blob, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put(blob, static_cast<std::uint32_t>(p.name.size()));
    blob += p.name;
    put(blob, static_cast<std::uint64_t>(p.value.size()));
    blob.append(reinterpret_cast<const char*>(p.value.data()), p.value.size_bytes());
  }
  {
    std::ofstream out(dir / "params.bin", std::ios::binary);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw IoError("cannot write " + (dir / "params.bin").string());
  }
  const nlohmann::json manifest = {{"spec", to_json(info.spec)},
                                   {"stage", info.stage},
                                   {"iteration", info.iteration},
                                   {"seed", info.seed},
                                   {"loss_history_path", info.loss_history_path},
                                   {"params_sha256", digest(blob)}};
  std::ofstream out(dir / "checkpoint.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("cannot write checkpoint manifest");
}

CheckpointInfo read_checkpoint_info(const fs::path& dir) {
  const nlohmann::json j = read_manifest(dir);
  try {
    CheckpointInfo info;
    info.spec = generator_spec_from_json(j.at("spec"));
    info.stage = j.at("stage").get<int>();
    info.iteration = j.at("iteration").get<long long>();
    info.seed = j.at("seed").get<std::uint64_t>();
    info.loss_history_path = j.at("loss_history_path").get<std::string>();
    return info;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint manifest: ") + e.what());
  }
}

Generator<float> load_checkpoint(const fs::path& dir, CheckpointInfo* info_out) {
  const CheckpointInfo info = read_checkpoint_info(dir);
  const std::string expected = read_manifest(dir).value("params_sha256", "");

  std::ifstream in(dir / "params.bin", std::ios::binary);
  if (!in) throw IoError("cannot open " + (dir / "params.bin").string());
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (digest(blob) != expected) throw IntegrityError("parameter blob digest mismatch");

  if (blob.size() < sizeof(kMagic) || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a parameter blob");
  std::size_t pos = sizeof(kMagic);
  if (take<std::uint32_t>(blob, pos) != kVersion) throw FormatError("unsupported blob version");

  Generator<float> net(info.spec);
  auto params = net.params();
  if (take<std::uint32_t>(blob, pos) != params.size())
    throw FormatError("parameter count does not match the spec");
  for (auto& p : params) {
    const auto len = take<std::uint32_t>(blob, pos);
    if (pos + len > blob.size() || blob.compare(pos, len, p.name) != 0)
      throw FormatError("unexpected parameter " + p.name);
    pos += len;
    const auto n = take<std::uint64_t>(blob, pos);
    if (n != p.value.size() || pos + p.value.size_bytes() > blob.size())
      throw FormatError("parameter " + p.name + " has the wrong size");
    std::memcpy(p.value.data(), blob.data() + pos, p.value.size_bytes());
    pos += p.value.size_bytes();
  }
  if (pos != blob.size()) throw FormatError("trailing bytes in parameter blob");
  if (info_out) *info_out = info;
  return net;
}

}  // namespace stabkit::nn
