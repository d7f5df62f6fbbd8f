#include "frrn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "frrn/errors.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'F', 'R', 'R', 'N'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t pos) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return value;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void save_checkpoint(const fs::path& path, const ParameterSet& tensors,
                     const nlohmann::json& config) {
  std::set<std::string> seen;
  nlohmann::json entries = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    if (!seen.insert(name).second) {
      throw std::invalid_argument("save_checkpoint: duplicate tensor name '" + name + "'");
    }
    entries.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}});
    offset += t.numel() * sizeof(float);
  }
  const nlohmann::json manifest = {
      {"format_version", kCheckpointVersion}, {"config", config}, {"tensors", entries}};
  const std::string text = manifest.dump();

  std::string blob(kMagic, 4);
  put_le<std::uint32_t>(blob, kCheckpointVersion);
  put_le<std::uint64_t>(blob, text.size());
  blob += text;
  blob.reserve(blob.size() + offset);
  for (const auto& entry : tensors) {
    for (Real v : entry.second.values()) {
      put_le<std::uint32_t>(blob, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }

  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) {
      throw DataError("cannot write checkpoint '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
  const std::string blob = read_file(path);
  const std::string where = "checkpoint '" + path.string() + "': ";
  constexpr std::size_t header = 4 + 4 + 8;
  if (blob.size() < header || std::memcmp(blob.data(), kMagic, 4) != 0) {
    throw DataError(where + "not an FRRN checkpoint");
  }
  const auto version = get_le<std::uint32_t>(blob, 4);
  if (version != kCheckpointVersion) {
    throw DataError(where + "format version " + std::to_string(version) + ", expected " +
                    std::to_string(kCheckpointVersion));
  }
  const auto manifest_size = get_le<std::uint64_t>(blob, 8);
  if (manifest_size > blob.size() - header) {
    throw DataError(where + "truncated manifest");
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(blob.substr(header, manifest_size));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "malformed manifest: " + e.what());
  }
  const std::size_t payload = header + manifest_size;

  Checkpoint ck;
  ck.config = manifest.value("config", nlohmann::json::object());
  std::uint64_t expected_offset = 0;
  try {
    for (const auto& entry : manifest.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<Shape>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      if (offset != expected_offset) {
        throw DataError(where + "tensor '" + name + "' has offset " + std::to_string(offset) +
                        ", expected " + std::to_string(expected_offset));
      }
      const std::size_t n = shape_numel(shape);
      if (payload + offset + n * sizeof(float) > blob.size()) {
        throw DataError(where + "truncated payload at tensor '" + name + "'");
      }
      std::vector<Real> values(n);
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = static_cast<Real>(
            std::bit_cast<float>(get_le<std::uint32_t>(blob, payload + offset + 4 * i)));
      }
      ck.tensors.emplace_back(name, Tensor(shape, std::move(values)));
      expected_offset = offset + n * sizeof(float);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "malformed manifest: " + e.what());
  }
  if (payload + expected_offset != blob.size()) {
    throw DataError(where + "payload holds " + std::to_string(blob.size() - payload) +
                    " bytes, manifest describes " + std::to_string(expected_offset));
  }
  return ck;
}

void load_into(const Checkpoint& checkpoint, const ParameterSet& targets) {
  std::map<std::string, const Tensor*> stored;
  for (const auto& [name, t] : checkpoint.tensors) {
    stored.emplace(name, &t);
  }
  std::vector<std::string> problems;
  std::set<std::string> wanted;
  for (const auto& [name, target] : targets) {
    wanted.insert(name);
    auto it = stored.find(name);
    if (it == stored.end()) {
      problems.push_back("missing tensor '" + name + "'");
    } else if (it->second->shape() != target.shape()) {
      problems.push_back("tensor '" + name + "' has shape " +
                         shape_to_string(it->second->shape()) + ", config expects " +
                         shape_to_string(target.shape()));
    }
  }
  for (const auto& [name, t] : checkpoint.tensors) {
    if (!wanted.count(name)) {
      problems.push_back("unknown tensor '" + name + "'");
    }
  }
  if (!problems.empty()) {
    std::string msg = "checkpoint does not match the active config:";
    for (const auto& p : problems) {
      msg += "\n  " + p;
    }
    throw DataError(msg);
  }
  for (const auto& [name, target] : targets) {
    const auto src = stored.at(name)->values();
    Tensor dst = target;
    std::copy(src.begin(), src.end(), dst.values().begin());
  }
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
