#include <fstream>
#include <iterator>

#include "rnnlab/data.hpp"
#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), {}};
}

std::uint32_t read_be32(const std::string& bytes, std::size_t offset, const std::string& file,
                        const char* what) {
  if (offset + 4 > bytes.size()) {
    throw FormatError(file + ": truncated while reading " + what, offset);
  }
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
  }
  return v;
}

}  // namespace

MnistReshape parse_reshape(std::string_view text) {
  if (text == "rows28x28") return MnistReshape::rows28x28;
  if (text == "pixels784x1") return MnistReshape::pixels784x1;
  throw std::invalid_argument("unknown reshape '" + std::string(text) +
                              "' (expected rows28x28 or pixels784x1)");
}

std::string_view to_string(MnistReshape r) noexcept {
  return r == MnistReshape::rows28x28 ? "rows28x28" : "pixels784x1";
}

SequenceDataset load_mnist(const std::filesystem::path& images,
                           const std::filesystem::path& labels, MnistReshape reshape) {
  const std::string img = slurp(images);
  const std::string lab = slurp(labels);
  const std::string img_name = images.filename().string();
  const std::string lab_name = labels.filename().string();

  const auto img_magic = read_be32(img, 0, img_name, "magic");
  if (img_magic != kImageMagic) {
    throw FormatError(img_name + ": bad image magic " + std::to_string(img_magic) +
                          " (expected 2051)",
                      0);
  }
  const auto count = read_be32(img, 4, img_name, "image count");
  const auto rows = read_be32(img, 8, img_name, "row count");
  const auto cols = read_be32(img, 12, img_name, "column count");
  if (rows != 28 || cols != 28) {
    throw FormatError(img_name + ": images are " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", expected 28x28",
                      8);
  }
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  const std::size_t expect_img = 16 + static_cast<std::size_t>(count) * pixels;
  if (img.size() < expect_img) {
    throw FormatError(img_name + ": truncated pixel payload, " + std::to_string(img.size()) +
                          " bytes for " + std::to_string(count) + " images",
                      img.size());
  }

  const auto lab_magic = read_be32(lab, 0, lab_name, "magic");
  if (lab_magic != kLabelMagic) {
    throw FormatError(lab_name + ": bad label magic " + std::to_string(lab_magic) +
                          " (expected 2049)",
                      0);
  }
  const auto lab_count = read_be32(lab, 4, lab_name, "label count");
  if (lab_count != count) {
    throw DataError(img_name + " holds " + std::to_string(count) + " images but " + lab_name +
                    " holds " + std::to_string(lab_count) + " labels");
  }
  if (lab.size() < 8 + static_cast<std::size_t>(count)) {
    throw FormatError(lab_name + ": truncated label payload", lab.size());
  }

  SequenceDataset ds;
  ds.steps = reshape == MnistReshape::rows28x28 ? rows : pixels;
  ds.features = reshape == MnistReshape::rows28x28 ? cols : 1;
  ds.class_names = {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"};
  ds.values.resize(static_cast<std::size_t>(count) * pixels);
  ds.labels.resize(count);
  // Both reshapes read pixels in raster order; only (T, m) differs.
  for (std::size_t i = 0; i < ds.values.size(); ++i) {
    ds.values[i] = static_cast<unsigned char>(img[16 + i]) / 255.0;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = static_cast<unsigned char>(lab[8 + i]);
    if (v > 9) {
      throw FormatError(lab_name + ": label " + std::to_string(v) + " outside 0-9", 8 + i);
    }
    ds.labels[i] = v;
  }
  return ds;
}

MnistSplit load_mnist_dir(const std::filesystem::path& dir, MnistReshape reshape) {
  std::filesystem::path base = dir;
  if (!std::filesystem::exists(base / "train-images-idx3-ubyte") &&
      std::filesystem::exists(base / "mnist" / "train-images-idx3-ubyte")) {
    base /= "mnist";
  }
  const char* names[] = {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                         "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"};
  for (const char* n : names) {
    if (!std::filesystem::exists(base / n)) {
      throw std::runtime_error("MNIST file " + (base / n).string() + " not found");
    }
  }
  return {load_mnist(base / names[0], base / names[1], reshape),
          load_mnist(base / names[2], base / names[3], reshape)};
}

}  // namespace rnnlab
