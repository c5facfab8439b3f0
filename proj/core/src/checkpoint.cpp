#include "wpinn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wpinn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr char kMagic[8] = {'W', 'P', 'I', 'N', 'N', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw std::runtime_error("truncated checkpoint");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const MlpParams& params) {
  params.validate();
  std::string out(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(params.widths.size()));
  for (int w : params.widths) put(out, static_cast<std::uint32_t>(w));
  for (Activation a : params.activations) put(out, static_cast<std::uint8_t>(a));
  put(out, static_cast<std::uint8_t>(params.head.kind));
  put(out, params.head.lo);
  put(out, params.head.hi);
  for (double v : flatten(params)) put(out, v);
  return out;
}

MlpParams deserialize(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a network checkpoint (bad magic)");
  }
  std::string body = bytes.substr(sizeof(kMagic));
  Reader in(body);
  if (in.get<std::uint32_t>() != kVersion) throw std::runtime_error("unsupported checkpoint version");

  MlpParams p;
  const auto count = in.get<std::uint32_t>();
  if (count < 2 || count > 1024) throw std::runtime_error("implausible layer count in checkpoint");
  for (std::uint32_t i = 0; i < count; ++i) p.widths.push_back(static_cast<int>(in.get<std::uint32_t>()));
  for (std::uint32_t i = 0; i + 2 < count; ++i) {
    const auto tag = in.get<std::uint8_t>();
    if (tag > 1) throw std::runtime_error("unknown activation tag in checkpoint");
    p.activations.push_back(static_cast<Activation>(tag));
  }
  const auto head = in.get<std::uint8_t>();
  if (head > 1) throw std::runtime_error("unknown head tag in checkpoint");
  p.head.kind = static_cast<OutputHead::Kind>(head);
  p.head.lo = in.get<double>();
  p.head.hi = in.get<double>();

  for (std::size_t i = 0; i + 1 < p.widths.size(); ++i) {
    p.weights.emplace_back(p.widths[i + 1], p.widths[i]);
    p.biases.emplace_back(p.widths[i + 1]);
  }
  std::vector<double> flat(p.parameter_count());
  for (double& v : flat) v = in.get<double>();
  if (!in.at_end()) throw std::runtime_error("trailing bytes in checkpoint");
  unflatten(flat, p);
  p.validate();
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace wpinn
