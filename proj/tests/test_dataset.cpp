#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "dropneuron/dataset.hpp"
#include "dropneuron/errors.hpp"
#include "dropneuron/losses.hpp"
#include "oracles.hpp"

using namespace dropneuron;

namespace {

void be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

// Hand-built IDX pair: n images of r x c pixels, pixel (k, i) = (k * 7 + i) % 256.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> idx_files(std::uint32_t n, std::uint32_t r,
                                                                          std::uint32_t c) {
  std::vector<std::uint8_t> img, lab;
  be32(img, 0x803);
  be32(img, n);
  be32(img, r);
  be32(img, c);
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t i = 0; i < r * c; ++i) img.push_back(static_cast<std::uint8_t>((k * 7 + i) % 256));
  be32(lab, 0x801);
  be32(lab, n);
  for (std::uint32_t k = 0; k < n; ++k) lab.push_back(static_cast<std::uint8_t>(k % 10));
  return {img, lab};
}

std::size_t offset_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.offset();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("sparse regression shapes") {
  Rng rng(1);
  const SparseRegressionData d = gen_sparse_regression(rng, SparseRegressionSpec{});
  CHECK(d.train.inputs.rows() == 500);
  CHECK(d.train.inputs.cols() == 20);
  CHECK(d.train.targets.rows() == 500);
  CHECK(d.train.targets.cols() == 1);
  CHECK(d.test.inputs.rows() == 500);
  CHECK(d.test.targets.cols() == 1);
  CHECK(d.x0.size() == 20);
  CHECK(std::count_if(d.x0.begin(), d.x0.end(), [](double v) { return v != 0.0; }) == 2);
}

TEST_CASE("noiseless sparse regression is consistent") {
  Rng rng(2);
  SparseRegressionSpec spec;
  spec.noise_sigma = 0.0;
  const SparseRegressionData d = gen_sparse_regression(rng, spec);
  for (const Dataset* s : {&d.train, &d.test}) {
    Matrix pred(s->size(), 1);
    for (std::size_t r = 0; r < s->size(); ++r) {
      double v = 0.0;
      for (std::size_t j = 0; j < 20; ++j) v += s->inputs(r, j) * d.x0[j];
      pred(r, 0) = v;
      CHECK(std::fabs(v - s->targets(r, 0)) <= 1e-15 * std::max(1.0, std::fabs(v)));
    }
    CHECK(nmse(s->targets, pred) < 1e-28);
  }

  // The feature columns of the whole design are unit vectors.
  for (std::size_t j = 0; j < 20; ++j) {
    double s = 0.0;
    for (const Dataset* part : {&d.train, &d.test})
      for (std::size_t r = 0; r < part->size(); ++r) s += part->inputs(r, j) * part->inputs(r, j);
    CHECK(std::fabs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("null signal is pure noise") {
  Rng rng(3);
  SparseRegressionSpec spec;
  spec.nonzeros = 0;
  spec.noise_sigma = 0.5;
  const SparseRegressionData d = gen_sparse_regression(rng, spec);
  for (double v : d.x0) CHECK(v == 0.0);
  double sq = 0.0;
  for (double v : d.train.targets.values()) sq += v * v;
  CHECK(std::sqrt(sq / 500) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("sparse regression settings validation") {
  Rng rng(1);
  SparseRegressionSpec spec;
  spec.nonzeros = 21;
  CHECK_THROWS_AS(gen_sparse_regression(rng, spec), ArgumentError);
  spec = {};
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(gen_sparse_regression(rng, spec), ArgumentError);
  spec = {};
  spec.n_test = 0;
  CHECK_THROWS_AS(gen_sparse_regression(rng, spec), ArgumentError);
}

TEST_CASE("IDX parsing and round trip") {
  const auto [img, lab] = idx_files(5, 4, 6);
  const Dataset d = parse_mnist(img, lab);
  CHECK(d.size() == 5);
  CHECK(d.inputs.cols() == 24);
  CHECK(d.image_height == 4);
  CHECK(d.image_width == 6);
  CHECK(d.task == TaskKind::classification);
  CHECK(d.labels == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(d.inputs(2, 3) == (2 * 7 + 3) / 255.0);
  for (double v : d.inputs.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  CHECK(encode_idx_images(d) == img);
  CHECK(encode_idx_labels(d) == lab);
  const Dataset again = parse_mnist(encode_idx_images(d), encode_idx_labels(d));
  CHECK(again.inputs == d.inputs);
  CHECK(again.labels == d.labels);
}

TEST_CASE("IDX files from disk") {
  const auto [img, lab] = idx_files(3, 2, 2);
  const auto dir = std::filesystem::temp_directory_path() / "dropneuron_idx_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "img", std::ios::binary).write(reinterpret_cast<const char*>(img.data()), img.size());
  std::ofstream(dir / "lab", std::ios::binary).write(reinterpret_cast<const char*>(lab.data()), lab.size());
  const Dataset d = load_mnist(dir / "img", dir / "lab");
  CHECK(d.size() == 3);
  CHECK_THROWS_AS(load_mnist(dir / "missing", dir / "lab"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("IDX parse errors carry the byte offset") {
  const auto [img, lab] = idx_files(3, 2, 2);

  auto bad_magic = img;
  bad_magic[3] = 0x01;
  CHECK(offset_of([&] { parse_mnist(bad_magic, lab); }) == 0);
  auto bad_label_magic = lab;
  bad_label_magic[2] = 0x09;
  CHECK(offset_of([&] { parse_mnist(img, bad_label_magic); }) == 0);

  // Truncated pixel data: the error points at the end of what was read.
  const std::vector<std::uint8_t> short_img(img.begin(), img.end() - 1);
  CHECK(offset_of([&] { parse_mnist(short_img, lab); }) == short_img.size());
  const std::vector<std::uint8_t> header_only(img.begin(), img.begin() + 6);
  CHECK(offset_of([&] { parse_mnist(header_only, lab); }) == 6);

  // Label count disagrees with the image count: points at the label count field.
  const auto lab4 = idx_files(4, 2, 2).second;
  CHECK(offset_of([&] { parse_mnist(img, lab4); }) == 4);

  auto bad_label = lab;
  bad_label[9] = 12;
  CHECK(offset_of([&] { parse_mnist(img, bad_label); }) == 9);
}

TEST_CASE("subsample draws distinct rows") {
  Rng rng(4);
  Matrix x(30, 1);
  for (std::size_t i = 0; i < 30; ++i) x(i, 0) = static_cast<double>(i);
  Dataset d{"ids", TaskKind::regression, x, x, {}, 0, 0};
  const Dataset s = subsample(d, rng, 12);
  std::set<double> seen(s.inputs.values().begin(), s.inputs.values().end());
  CHECK(seen.size() == 12);
  CHECK(s.targets == s.inputs);

  const Dataset all = subsample(d, rng, 30);
  std::multiset<double> a(all.inputs.values().begin(), all.inputs.values().end());
  std::multiset<double> b(x.values().begin(), x.values().end());
  CHECK(a == b);
  CHECK_THROWS_AS(subsample(d, rng, 31), ArgumentError);
}

TEST_CASE("downscale averages blocks") {
  Dataset d;
  d.task = TaskKind::reconstruction;
  d.image_height = d.image_width = 28;
  d.inputs = Matrix(2, 784, 0.25);
  d.targets = d.inputs;
  const Dataset s = downscale(d, 2);
  CHECK(s.inputs.cols() == 196);
  CHECK(s.image_height == 14);
  for (double v : s.inputs.values()) CHECK(v == 0.25);
  CHECK(s.targets == s.inputs);

  Dataset tiny;
  tiny.image_height = tiny.image_width = 2;
  tiny.inputs = Matrix::from_rows({{0.0, 1.0, 0.5, 0.5}});
  tiny.targets = Matrix(1, 1);
  CHECK(downscale(tiny, 2).inputs == Matrix::from_rows({{0.5}}));
  CHECK_THROWS_AS(downscale(d, 3), ArgumentError);
  CHECK_THROWS_AS(downscale(d, 0), ArgumentError);
}

TEST_CASE("reconstruction view") {
  const auto [img, lab] = idx_files(3, 2, 2);
  const Dataset r = as_reconstruction(parse_mnist(img, lab));
  CHECK(r.task == TaskKind::reconstruction);
  CHECK(r.targets == r.inputs);
}

TEST_CASE("dataset row validation") {
  Dataset d{"bad", TaskKind::regression, Matrix(3, 2), Matrix(2, 1), {}, 0, 0};
  CHECK_THROWS_AS(d.validate(), DimensionError);
}

TEST_CASE("synthetic csv export") {
  Rng rng(6);
  SparseRegressionSpec spec;
  spec.n_features = 3;
  spec.nonzeros = 1;
  spec.n_train = spec.n_test = 4;
  const SparseRegressionData d = gen_sparse_regression(rng, spec);
  const auto path = std::filesystem::temp_directory_path() / "dropneuron_csv_test.csv";
  write_csv(d.train, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,x2,x3,y");
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    REQUIRE(vals.size() == 4);
    CHECK(vals[0] == d.train.inputs(lines, 0));
    CHECK(vals[3] == d.train.targets(lines, 0));
    ++lines;
  }
  CHECK(lines == 4);
  std::filesystem::remove(path);
}
