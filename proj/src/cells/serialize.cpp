#include "rnnlab/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace {

constexpr char kMagic[8] = {'R', 'N', 'N', 'L', 'A', 'B', 'W', '1'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t arch_tag(Arch a) {
  switch (a) {
    case Arch::rnn: return 0;
    case Arch::gru: return 1;
    case Arch::lstm: return 2;
    case Arch::plstm: return 3;
    case Arch::litelstm: return 4;
  }
  return 0;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
}

void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
  }
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(v);
  }

  void magic() {
    need(sizeof kMagic, "magic");
    if (std::memcmp(bytes_.data(), kMagic, sizeof kMagic) != 0) {
      throw FormatError("weights file: bad magic", 0);
    }
    pos_ += sizeof kMagic;
  }

  std::size_t pos() const noexcept { return pos_; }
  std::size_t size() const noexcept { return bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string("weights file truncated while reading ") + what, pos_);
    }
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

void read_into(Reader& r, Matrix& m) {
  for (double& v : m.flat()) {
    v = r.f64("array data");
  }
}

}  // namespace

void save_weights(const std::filesystem::path& path, const CellParams& cell,
                  const ParamSet* head) {
  const std::size_t classes = head ? head->value(0).rows() : 0;
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, arch_tag(cell.shape.arch));
  put_u32(out, static_cast<std::uint32_t>(cell.shape.hidden));
  put_u32(out, static_cast<std::uint32_t>(cell.shape.input));
  put_u32(out, cell.shape.gate == GateFn::logistic ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(classes));
  put_u32(out, static_cast<std::uint32_t>(cell.arrays.size() + (head ? head->size() : 0)));
  put_u32(out, 0);

  nlohmann::ordered_json side;
  side["format"] = "rnnlab-weights";
  side["version"] = kVersion;
  side["arch"] = std::string(to_string(cell.shape.arch));
  side["hidden"] = cell.shape.hidden;
  side["input"] = cell.shape.input;
  side["gate"] = std::string(to_string(cell.shape.gate));
  side["classes"] = classes;
  side["dtype"] = "f64le";
  side["arrays"] = nlohmann::ordered_json::array();

  auto emit = [&](const ParamSlot& slot, const std::string& prefix) {
    side["arrays"].push_back({{"name", prefix + slot.name},
                              {"shape", {slot.value.rows(), slot.value.cols()}},
                              {"offset", out.size()},
                              {"count", slot.value.size()}});
    for (double v : slot.value.flat()) {
      put_f64(out, v);
    }
  };
  for (const auto& slot : cell.arrays) {
    emit(slot, "cell.");
  }
  if (head) {
    for (const auto& slot : *head) {
      emit(slot, "head.");
    }
  }

  std::ofstream bin(path, std::ios::binary | std::ios::trunc);
  if (!bin) {
    throw std::runtime_error("cannot write " + path.string());
  }
  bin.write(out.data(), static_cast<std::streamsize>(out.size()));
  std::ofstream js(path.string() + ".json", std::ios::trunc);
  js << side.dump(2) << '\n';
}

StoredWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open weights file " + path.string());
  }
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  r.magic();
  const auto version = r.u32("version");
  if (version != kVersion) {
    throw FormatError("weights file: unsupported version " + std::to_string(version), 8);
  }
  const auto tag = r.u32("architecture");
  if (tag > 4) {
    throw FormatError("weights file: unknown architecture tag " + std::to_string(tag), 12);
  }
  CellShape shape;
  shape.arch = kAllArchs[tag];
  shape.hidden = r.u32("hidden size");
  shape.input = r.u32("input size");
  const auto gate = r.u32("gate");
  if (gate > 1) {
    throw FormatError("weights file: unknown gate tag " + std::to_string(gate), 24);
  }
  shape.gate = gate == 0 ? GateFn::logistic : GateFn::hard;
  const auto classes = r.u32("classes");
  const auto count = r.u32("array count");
  (void)r.u32("reserved");
  if (shape.hidden == 0 || shape.input == 0) {
    throw FormatError("weights file: zero hidden or input size", 16);
  }

  StoredWeights w{zero_cell_params(shape), {}};
  const std::size_t expected = w.cell.arrays.size() + (classes > 0 ? 2 : 0);
  if (count != expected) {
    throw FormatError("weights file: " + std::to_string(count) + " arrays, expected " +
                          std::to_string(expected),
                      32);
  }
  for (auto& slot : w.cell.arrays) {
    read_into(r, slot.value);
  }
  if (classes > 0) {
    w.head.add("W_out", SlotKind::weight, Matrix(classes, shape.hidden));
    w.head.add("b_out", SlotKind::bias, Matrix(classes, 1));
    for (auto& slot : w.head) {
      read_into(r, slot.value);
    }
  }
  if (r.pos() != r.size()) {
    throw FormatError("weights file: trailing bytes", r.pos());
  }
  return w;
}

}  // namespace rnnlab
