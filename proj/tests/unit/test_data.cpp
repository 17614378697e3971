#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "rnnlab/data.hpp"
#include "rnnlab/errors.hpp"
#include "test_util.hpp"

using namespace rnnlab;
using testutil::fixture;

namespace {

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

SequenceDataset toy_dataset(std::size_t n, std::size_t steps, std::size_t features) {
  SequenceDataset ds;
  ds.steps = steps;
  ds.features = features;
  ds.class_names = {"a", "b", "c"};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < steps * features; ++k) {
      ds.values.push_back(static_cast<double>(i) + 0.001 * static_cast<double>(k));
    }
    ds.labels.push_back(static_cast<int>(i % 3));
  }
  return ds;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("two-image IDX fixture decodes exactly") {
  const auto ds = load_mnist(fixture("two-images-idx3-ubyte"), fixture("two-labels-idx1-ubyte"),
                             MnistReshape::rows28x28);
  REQUIRE(ds.size() == 2);
  CHECK(ds.steps == 28);
  CHECK(ds.features == 28);
  CHECK(ds.labels == std::vector<int>{3, 7});
  const auto a = ds.sample(0);
  CHECK(a[0] == 1.0);
  CHECK(a[783] == 51.0 / 255.0);
  CHECK(std::count(a.begin(), a.end(), 0.0) == 782);
  const auto b = ds.sample(1);
  for (std::size_t i = 0; i < 784; ++i) CHECK(b[i] == static_cast<double>(i % 256) / 255.0);

  const auto flat = load_mnist(fixture("two-images-idx3-ubyte"), fixture("two-labels-idx1-ubyte"),
                               MnistReshape::pixels784x1);
  CHECK(flat.steps == 784);
  CHECK(flat.features == 1);
  CHECK(flat.values == ds.values);
}

TEST_CASE("malformed IDX files report byte offsets") {
  testutil::TempDir dir("idx");
  const std::string images = read_bytes(fixture("two-images-idx3-ubyte"));
  const std::string labels = read_bytes(fixture("two-labels-idx1-ubyte"));
  const auto good_labels = write_file(dir.path() / "labels", labels);

  std::string bad_magic = images;
  bad_magic[3] = 0x01;
  try {
    (void)load_mnist(write_file(dir.path() / "m", bad_magic), good_labels, MnistReshape::rows28x28);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }
  try {
    (void)load_mnist(write_file(dir.path() / "t", images.substr(0, 1000)), good_labels,
                     MnistReshape::rows28x28);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() >= 16);
  }
  try {
    (void)load_mnist(write_file(dir.path() / "h", images.substr(0, 6)), good_labels,
                     MnistReshape::rows28x28);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
  std::string one_label = labels;
  one_label[7] = 1;
  one_label.pop_back();
  CHECK_THROWS_AS((void)load_mnist(fixture("two-images-idx3-ubyte"),
                                   write_file(dir.path() / "l1", one_label), MnistReshape::rows28x28),
                  DataError);
}

TEST_CASE("blank image gives an all-zero sequence") {
  testutil::TempDir dir("blank");
  std::string images = read_bytes(fixture("two-images-idx3-ubyte"));
  std::fill(images.begin() + 16, images.end(), '\0');
  const auto ds = load_mnist(write_file(dir.path() / "img", images), fixture("two-labels-idx1-ubyte"),
                             MnistReshape::rows28x28);
  for (double v : ds.values) CHECK(v == 0.0);
}

TEST_CASE("tiny intrusion fixture windows into two labelled sequences") {
  const auto schema = IntrusionSchema::from_json_file(fixture("intrusion_tiny.schema.json"));
  CHECK(schema.window_length == 3);
  IntrusionLoadOptions opts;
  opts.test_fraction = 0.0;
  const auto split = load_intrusion_csv(fixture("intrusion_tiny.csv"), schema, opts);
  REQUIRE(split.train.size() == 2);
  CHECK(split.train.labels == std::vector<int>{0, 1});
  CHECK(split.train.steps == 3);
  CHECK(split.train.features == 2);
  CHECK(split.train.class_names == std::vector<std::string>{"normal", "attack"});
  // pkt_len 0..5 scales to 0..1; ttl is constant and maps to 0.
  CHECK(split.train.values[0] == 0.0);
  CHECK(split.train.values[10] == 1.0);
  CHECK(split.train.values[1] == 0.0);
  CHECK(split.train.values[11] == 0.0);
}

TEST_CASE("multiclass mode follows the taxonomy") {
  const auto schema = IntrusionSchema::from_json_file(fixture("intrusion_tiny.schema.json"));
  IntrusionLoadOptions opts;
  opts.mode = LabelMode::multiclass;
  opts.test_fraction = 0.0;
  const auto split = load_intrusion_csv(fixture("intrusion_tiny.csv"), schema, opts);
  CHECK(split.train.num_classes() == 9);
  CHECK(split.train.class_names[split.train.labels[1]] == "dos_syn_flooding");
}

TEST_CASE("single-class file warns of degenerate balance") {
  testutil::TempDir dir("single");
  const auto csv = write_file(dir.path() / "s.csv", "a,label\n1,normal\n2,normal\n3,normal\n4,normal\n");
  IntrusionSchema schema = IntrusionSchema::from_json_text(R"({"feature_columns": ["a"], "window_length": 2})");
  IntrusionLoadOptions opts;
  opts.test_fraction = 0.0;
  const auto split = load_intrusion_csv(csv, schema, opts);
  CHECK(split.train.labels == std::vector<int>{0, 0});
  const auto& w = split.train.warnings;
  CHECK(std::any_of(w.begin(), w.end(), [](const std::string& s) { return s.find("degenerate") != std::string::npos; }));
}

TEST_CASE("csv errors carry line numbers and known labels") {
  testutil::TempDir dir("csverr");
  IntrusionSchema schema = IntrusionSchema::from_json_text(R"({"feature_columns": ["a"], "window_length": 1})");
  CHECK_THROWS_WITH_AS((void)load_intrusion_csv(write_file(dir.path() / "n.csv", "a,label\n1,normal\nx,normal\n"), schema),
                       doctest::Contains(":3:"), DataError);
  CHECK_THROWS_WITH_AS((void)load_intrusion_csv(write_file(dir.path() / "u.csv", "a,label\n1,martian\n"), schema),
                       doctest::Contains("known labels: normal"), DataError);
  CHECK_THROWS_AS((void)load_intrusion_csv(write_file(dir.path() / "c.csv", "b,label\n1,normal\n"), schema),
                  DataError);
  CHECK_THROWS_AS(IntrusionSchema::from_json_text(R"({"feature_columns": []})"), DataError);
}

TEST_CASE("windows never straddle flows and take the last row's label") {
  testutil::TempDir dir("flows");
  const auto csv = write_file(dir.path() / "f.csv",
                              "flow,a,label\n"
                              "x,1,normal\ny,10,normal\nx,2,arp_spoofing\ny,11,normal\nx,3,normal\n");
  IntrusionSchema schema = IntrusionSchema::from_json_text(
      R"({"feature_columns": ["a"], "window_length": 2, "flow_column": "flow"})");
  IntrusionLoadOptions opts;
  opts.test_fraction = 0.0;
  const auto split = load_intrusion_csv(csv, schema, opts);
  REQUIRE(split.train.size() == 2);
  CHECK(split.train.labels == std::vector<int>{1, 0});
  CHECK(split.train.warnings.size() >= 1);
}

TEST_CASE("stratified split with training-only scaling") {
  const auto schema = IntrusionSchema::from_json_file(fixture("intrusion_separable.schema.json"));
  const auto split = load_intrusion_csv(fixture("intrusion_separable.csv"), schema);
  const std::size_t total = split.train.size() + split.test.size();
  CHECK(static_cast<double>(split.test.size()) == doctest::Approx(0.2 * static_cast<double>(total)).epsilon(0.02));
  for (int cls : {0, 1}) {
    const auto in_train = std::count(split.train.labels.begin(), split.train.labels.end(), cls);
    const auto in_test = std::count(split.test.labels.begin(), split.test.labels.end(), cls);
    CHECK(std::abs(static_cast<double>(in_test) / static_cast<double>(in_train + in_test) - 0.2) < 0.02);
  }
  for (double v : split.train.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // Test values use the training range; they may fall outside [0, 1].
  std::vector<double> mn(6, 1e9), mx(6, -1e9);
  for (std::size_t i = 0; i < split.train.values.size(); ++i) {
    mn[i % 6] = std::min(mn[i % 6], split.train.values[i]);
    mx[i % 6] = std::max(mx[i % 6], split.train.values[i]);
  }
  for (std::size_t f = 0; f < 6; ++f) {
    CHECK(mn[f] == 0.0);
    CHECK(mx[f] == 1.0);
  }
  const auto again = load_intrusion_csv(fixture("intrusion_separable.csv"), schema);
  CHECK(again.test.values == split.test.values);
}

TEST_CASE("batch sizes and order") {
  const auto ds = toy_dataset(10, 2, 3);
  const Batches plain = batches(ds, 3, false, 0);
  std::vector<std::size_t> sizes;
  for (const Batch& b : plain) sizes.push_back(b.labels.size());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 3, 1});
  std::vector<std::size_t> expected(10);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(std::vector<std::size_t>(plain.order().begin(), plain.order().end()) == expected);

  const Batches s1 = batches(ds, 3, true, 99), s2 = batches(ds, 3, true, 99), s3 = batches(ds, 3, true, 100);
  CHECK(std::equal(s1.order().begin(), s1.order().end(), s2.order().begin()));
  CHECK(!std::equal(s1.order().begin(), s1.order().end(), s3.order().begin()));

  const Batch b = plain[1];
  REQUIRE(b.inputs.size() == 2);
  CHECK(b.inputs[0].rows() == 3);
  CHECK(b.inputs[0].cols() == 3);
  CHECK(b.inputs[1](2, 1) == 5.0 + 0.004);
  CHECK(b.labels == std::vector<int>{0, 1, 2});
}

TEST_CASE("property: batching round-trip") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 60, bs = 1 + rng() % 20;
    const auto ds = toy_dataset(n, 1 + rng() % 3, 1 + rng() % 3);
    const Batches plan = batches(ds, bs, trial % 3 != 0, rng());
    std::vector<int> seen(n, 0);
    for (const Batch& b : plan) {
      CHECK(b.labels.size() <= bs);
      for (std::size_t r = 0; r < b.indices.size(); ++r) {
        const std::size_t i = b.indices[r];
        ++seen[i];
        CHECK(b.labels[r] == ds.labels[i]);
        CHECK(b.inputs[0](r, 0) == ds.sample(i)[0]);
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("dataset validation") {
  auto ds = toy_dataset(3, 2, 2);
  CHECK_NOTHROW(ds.validate());
  ds.labels[1] = 5;
  CHECK_THROWS_AS(ds.validate(), DataError);
  ds = toy_dataset(3, 2, 2);
  ds.values.pop_back();
  CHECK_THROWS_AS(ds.validate(), DataError);
  CHECK(toy_dataset(5, 1, 1).head(2).size() == 2);
}

TEST_CASE("official MNIST files when available") {
  const char* dir = std::getenv("RNNLAB_DATA_DIR");
  if (!dir || !std::filesystem::exists(std::filesystem::path(dir) / "t10k-images-idx3-ubyte")) {
    MESSAGE("RNNLAB_DATA_DIR not set or lacks MNIST; skipped");
    return;
  }
  const auto split = load_mnist_dir(dir, MnistReshape::rows28x28);
  CHECK(split.train.size() == 60000);
  CHECK(split.test.size() == 10000);
  std::vector<int> hist(10, 0);
  for (int l : split.test.labels) ++hist[static_cast<std::size_t>(l)];
  CHECK(hist == std::vector<int>{980, 1135, 1032, 1010, 982, 892, 958, 1028, 974, 1009});
  const auto [lo, hi] = std::minmax_element(split.test.values.begin(), split.test.values.end());
  CHECK(*lo == 0.0);
  CHECK(*hi == 1.0);
}

}  // TEST_SUITE
