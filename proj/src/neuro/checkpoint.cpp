#include "toffe/neuro/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace toffe::neuro {
namespace {

class Writer {
 public:
  template <typename T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
    }
  }
  void put_string(const std::string& s) {
    if (s.size() > 0xFFFF) throw CheckpointError("checkpoint string too long");
    put<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  std::vector<unsigned char> bytes;
};

class Reader {
 public:
  explicit Reader(std::vector<unsigned char> b) : bytes_(std::move(b)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::string get_string() {
    const auto n = get<std::uint16_t>();
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw CheckpointError("checkpoint is truncated");
  }
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void Checkpoint::add(const Parameter& p) {
  NamedBlob b{p.name, p.value.shape, {}};
  b.values.reserve(p.value.size());
  for (double v : p.value.data) b.values.push_back(static_cast<float>(v));
  blobs.push_back(std::move(b));
}

const NamedBlob& Checkpoint::blob(const std::string& name) const {
  for (const auto& b : blobs) {
    if (b.name == name) return b;
  }
  throw CheckpointError("checkpoint has no parameter '" + name + "'");
}

void Checkpoint::load_into(Parameter& p) const {
  const NamedBlob& b = blob(p.name);
  if (b.shape != p.value.shape) {
    throw CheckpointError("parameter '" + p.name + "' has shape " + shape_string(b.shape) + ", expected " +
                          shape_string(p.value.shape));
  }
  for (std::size_t i = 0; i < b.values.size(); ++i) p.value[i] = static_cast<double>(b.values[i]);
}

const std::string& Checkpoint::meta(const std::string& key) const {
  const auto it = metadata.find(key);
  if (it == metadata.end()) throw CheckpointError("checkpoint metadata lacks '" + key + "'");
  return it->second;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  Writer w;
  w.bytes = {'T', 'F', 'C', 'K'};
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put_string(ck.kind);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ck.metadata.size()));
  for (const auto& [k, v] : ck.metadata) {
    w.put_string(k);
    w.put_string(v);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ck.blobs.size()));
  for (const auto& b : ck.blobs) {
    if (b.values.size() != element_count(b.shape)) throw CheckpointError("blob '" + b.name + "' size mismatch");
    w.put_string(b.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(b.shape.size()));
    for (int d : b.shape) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
    for (float f : b.values) w.put<std::uint32_t>(std::bit_cast<std::uint32_t>(f));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(w.bytes.data()), static_cast<std::streamsize>(w.bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "TFCK", 4) != 0) {
    throw CheckpointError(path.string() + " is not a checkpoint");
  }
  Reader r(std::vector<unsigned char>(bytes.begin() + 4, bytes.end()));
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ck;
  ck.kind = r.get_string();
  const auto n_meta = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.get_string();
    ck.metadata[k] = r.get_string();
  }
  const auto n_blobs = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_blobs; ++i) {
    NamedBlob b;
    b.name = r.get_string();
    const auto rank = r.get<std::uint8_t>();
    for (int d = 0; d < rank; ++d) b.shape.push_back(static_cast<int>(r.get<std::uint32_t>()));
    b.values.resize(element_count(b.shape));
    for (float& f : b.values) f = std::bit_cast<float>(r.get<std::uint32_t>());
    ck.blobs.push_back(std::move(b));
  }
  if (!r.done()) throw CheckpointError(path.string() + " has trailing bytes");
  return ck;
}

}  // namespace toffe::neuro
