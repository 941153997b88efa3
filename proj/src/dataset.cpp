#include "dropneuron/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>

#include "dropneuron/errors.hpp"

namespace dropneuron {

std::string_view to_string(TaskKind t) noexcept {
  switch (t) {
    case TaskKind::regression:
      return "regression";
    case TaskKind::classification:
      return "classification";
    case TaskKind::reconstruction:
      return "reconstruction";
  }
  return "regression";
}

void Dataset::validate() const {
  if (task == TaskKind::classification) {
    if (labels.size() != inputs.rows()) {
      throw DimensionError("dataset '" + name + "': " + std::to_string(inputs.rows()) + " inputs but " +
                           std::to_string(labels.size()) + " labels");
    }
  } else if (targets.rows() != inputs.rows()) {
    throw DimensionError("dataset '" + name + "': " + std::to_string(inputs.rows()) + " inputs but " +
                         std::to_string(targets.rows()) + " targets");
  }
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.name = data.name;
  out.task = data.task;
  out.image_height = data.image_height;
  out.image_width = data.image_width;
  out.inputs = Matrix(rows.size(), data.inputs.cols());
  if (data.targets.cols() > 0) out.targets = Matrix(rows.size(), data.targets.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t src = rows[r];
    if (src >= data.size()) throw ArgumentError("select_rows: row " + std::to_string(src) + " out of range");
    std::ranges::copy(data.inputs.row(src), out.inputs.row(r).begin());
    if (out.targets.cols() > 0) std::ranges::copy(data.targets.row(src), out.targets.row(r).begin());
    if (!data.labels.empty()) out.labels.push_back(data.labels[src]);
  }
  return out;
}

Dataset as_reconstruction(const Dataset& data) {
  Dataset out = data;
  out.task = TaskKind::reconstruction;
  out.targets = data.inputs;
  return out;
}

Dataset subsample(const Dataset& data, Rng& rng, std::size_t k) {
  if (k > data.size()) {
    throw ArgumentError("subsample: k=" + std::to_string(k) + " exceeds dataset size " + std::to_string(data.size()));
  }
  const auto rows = rng.sample_without_replacement(data.size(), k);
  return select_rows(data, rows);
}

Dataset downscale(const Dataset& data, std::size_t factor) {
  const std::size_t h = data.image_height;
  const std::size_t w = data.image_width;
  if (factor == 0) throw ArgumentError("downscale: factor must be positive");
  if (h == 0 || w == 0 || h * w != data.inputs.cols()) throw ArgumentError("downscale: dataset is not an image set");
  if (h % factor != 0 || w % factor != 0) {
    throw ArgumentError("downscale: image side " + std::to_string(h) + "x" + std::to_string(w) +
                        " is not divisible by " + std::to_string(factor));
  }
  const std::size_t oh = h / factor;
  const std::size_t ow = w / factor;
  const double inv = 1.0 / static_cast<double>(factor * factor);

  auto pool = [&](const Matrix& src) {
    Matrix out(src.rows(), oh * ow);
    for (std::size_t n = 0; n < src.rows(); ++n) {
      auto in = src.row(n);
      auto o = out.row(n);
      for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
          double s = 0.0;
          for (std::size_t dr = 0; dr < factor; ++dr) {
            for (std::size_t dc = 0; dc < factor; ++dc) s += in[(r * factor + dr) * w + c * factor + dc];
          }
          o[r * ow + c] = s * inv;
        }
      }
    }
    return out;
  };

  Dataset out = data;
  out.inputs = pool(data.inputs);
  if (data.task == TaskKind::reconstruction) out.targets = out.inputs;
  out.image_height = oh;
  out.image_width = ow;
  return out;
}

void SparseRegressionSpec::validate() const {
  if (n_features == 0) throw ArgumentError("sparse regression: n_features must be positive");
  if (nonzeros > n_features) throw ArgumentError("sparse regression: nonzeros exceeds n_features");
  if (n_train == 0 || n_test == 0) throw ArgumentError("sparse regression: empty split");
  if (noise_sigma < 0.0) throw ArgumentError("sparse regression: noise_sigma must be non-negative");
}

SparseRegressionData gen_sparse_regression(Rng& rng, const SparseRegressionSpec& spec) {
  spec.validate();
  const std::size_t m = spec.n_train + spec.n_test;
  const Matrix phi = unit_sphere_columns(rng, m, spec.n_features);
  std::vector<double> x0 = sparse_vector(rng, spec.n_features, spec.nonzeros, spec.magnitude);

  Matrix y(m, 1);
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    auto row = phi.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x0[j];
    y(r, 0) = s;
  }
  if (spec.noise_sigma > 0.0) {
    for (double& v : y.values()) v += rng.normal(0.0, spec.noise_sigma);
  }

  Dataset all{"sparse_regression", TaskKind::regression, phi, y, {}, 0, 0};
  std::vector<std::size_t> train_rows(spec.n_train), test_rows(spec.n_test);
  for (std::size_t i = 0; i < spec.n_train; ++i) train_rows[i] = i;
  for (std::size_t i = 0; i < spec.n_test; ++i) test_rows[i] = spec.n_train + i;

  SparseRegressionData out{select_rows(all, train_rows), select_rows(all, test_rows), std::move(x0)};
  out.train.name = "sparse_regression/train";
  out.test.name = "sparse_regression/test";
  return out;
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
  if (bytes.size() < offset + 4) throw ParseError(std::string("truncated IDX header: missing ") + what, bytes.size());
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Dataset parse_mnist(std::span<const std::uint8_t> image_bytes, std::span<const std::uint8_t> label_bytes) {
  const std::uint32_t magic = read_be32(image_bytes, 0, "image magic");
  if (magic != kImageMagic) throw ParseError("bad image magic number " + std::to_string(magic), 0);
  const std::uint32_t count = read_be32(image_bytes, 4, "image count");
  const std::uint32_t rows = read_be32(image_bytes, 8, "row count");
  const std::uint32_t cols = read_be32(image_bytes, 12, "column count");
  const std::size_t pixels = std::size_t{rows} * cols;
  const std::size_t expected = 16 + std::size_t{count} * pixels;
  if (image_bytes.size() < expected) {
    throw ParseError("truncated image data: expected " + std::to_string(expected) + " bytes, got " +
                         std::to_string(image_bytes.size()),
                     image_bytes.size());
  }

  const std::uint32_t lmagic = read_be32(label_bytes, 0, "label magic");
  if (lmagic != kLabelMagic) throw ParseError("bad label magic number " + std::to_string(lmagic), 0);
  const std::uint32_t lcount = read_be32(label_bytes, 4, "label count");
  if (lcount != count) {
    throw ParseError("label count " + std::to_string(lcount) + " does not match image count " + std::to_string(count),
                     4);
  }
  if (label_bytes.size() < 8 + std::size_t{lcount}) {
    throw ParseError("truncated label data: expected " + std::to_string(8 + std::size_t{lcount}) + " bytes, got " +
                         std::to_string(label_bytes.size()),
                     label_bytes.size());
  }

  Dataset out;
  out.name = "mnist";
  out.task = TaskKind::classification;
  out.image_height = rows;
  out.image_width = cols;
  out.inputs = Matrix(count, pixels);
  auto v = out.inputs.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = image_bytes[16 + i] / 255.0;
  out.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t l = label_bytes[8 + i];
    if (l > 9) throw ParseError("label " + std::to_string(l) + " outside 0..9", 8 + i);
    out.labels[i] = l;
  }
  return out;
}

Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto ib = read_file(images);
  const auto lb = read_file(labels);
  Dataset d = parse_mnist(ib, lb);
  d.name = images.filename().string();
  return d;
}

std::vector<std::uint8_t> encode_idx_images(const Dataset& data) {
  if (data.image_height * data.image_width != data.inputs.cols()) {
    throw DimensionError("encode_idx_images: dataset has no image geometry");
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + data.inputs.size());
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(data.size()));
  write_be32(out, static_cast<std::uint32_t>(data.image_height));
  write_be32(out, static_cast<std::uint32_t>(data.image_width));
  for (double p : data.inputs.values()) {
    const double clamped = std::clamp(p, 0.0, 1.0);
    out.push_back(static_cast<std::uint8_t>(std::lround(clamped * 255.0)));
  }
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(const Dataset& data) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + data.labels.size());
  write_be32(out, kLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(data.labels.size()));
  for (int l : data.labels) out.push_back(static_cast<std::uint8_t>(l));
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const std::size_t n_in = data.inputs.cols();
  for (std::size_t j = 0; j < n_in; ++j) out << (j ? "," : "") << "x" << j + 1;
  if (data.task == TaskKind::classification) {
    out << ",label\n";
  } else {
    for (std::size_t j = 0; j < data.targets.cols(); ++j) {
      out << ",y" << (data.targets.cols() > 1 ? std::to_string(j + 1) : "");
    }
    out << "\n";
  }
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto row = data.inputs.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    if (data.task == TaskKind::classification) {
      out << "," << data.labels[r];
    } else {
      for (double t : data.targets.row(r)) out << "," << t;
    }
    out << "\n";
  }
}

}  // namespace dropneuron
