#include "privade/fixtures/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "privade/common/errors.hpp"
#include "privade/numerics/architectures.hpp"
#include "privade/numerics/model_io.hpp"
#include "privade/selection/selection.hpp"

namespace privade::fixtures {

using numerics::FixedScalar;
using numerics::FixedTensor;
using selection::Dataset;

namespace {

// Box-Muller on the DRBG stream so fixtures are identical across standard libraries.
double normal(Drbg& rng) {
  double u1 = 1.0 - rng.uniform01();
  double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Segments a..g as (x0, y0, x1, y1) strokes on the 8x8 grid.
constexpr std::array<std::array<int, 4>, 7> kSegments = {{
    {1, 0, 6, 0},  // a
    {6, 0, 6, 4},  // b
    {6, 4, 6, 7},  // c
    {1, 7, 6, 7},  // d
    {1, 4, 1, 7},  // e
    {1, 0, 1, 4},  // f
    {1, 4, 6, 4},  // g
}};

constexpr std::array<const char*, 10> kDigitSegments = {"abcdef", "bc",     "abdeg", "abcdg",   "bcfg",
                                                        "acdfg",  "acdefg", "abc",   "abcdefg", "abcdfg"};

}  // namespace

Dataset gaussian_blobs(Drbg& rng, std::size_t n, std::size_t classes, std::size_t dim) {
  if (classes == 0 || dim == 0) fail(ErrorCode::InvalidConfig, "gaussian fixture needs classes and dim");
  Dataset ds;
  ds.num_classes = classes;
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = rng.uniform(classes);
    double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
    for (std::size_t j = 0; j < dim; ++j) {
      double centre = j == 0 ? 3.0 * std::cos(angle) : j == 1 ? 3.0 * std::sin(angle) : 0.0;
      v[j] = centre + 0.5 * normal(rng);
    }
    ds.add(FixedTensor::from_doubles({dim}, v), c);
  }
  return ds;
}

Dataset digit_images(Drbg& rng, std::size_t n) {
  Dataset ds;
  ds.num_classes = 10;
  std::vector<double> px(64);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = rng.uniform(10);
    int dx = static_cast<int>(rng.uniform(3)) - 1;
    int dy = static_cast<int>(rng.uniform(3)) - 1;
    double ink = 0.8 + 0.4 * rng.uniform01();
    std::fill(px.begin(), px.end(), 0.0);
    for (const char* s = kDigitSegments[c]; *s; ++s) {
      const auto& seg = kSegments[static_cast<std::size_t>(*s - 'a')];
      for (int y = seg[1]; y <= seg[3]; ++y) {
        for (int x = seg[0]; x <= seg[2]; ++x) {
          int xx = x + dx, yy = y + dy;
          if (xx >= 0 && xx < 8 && yy >= 0 && yy < 8) px[static_cast<std::size_t>(yy * 8 + xx)] = ink;
        }
      }
    }
    for (auto& p : px) p = std::clamp(p + 0.15 * (2.0 * rng.uniform01() - 1.0), 0.0, 1.0);
    ds.add(FixedTensor::from_doubles({1, 8, 8}, px), c);
  }
  return ds;
}

Dataset random_images(Drbg& rng, const numerics::Shape& shape, std::size_t n, std::size_t classes) {
  Dataset ds;
  ds.num_classes = classes;
  std::size_t size = numerics::shape_size(shape);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int32_t> raw(size);
    for (auto& v : raw) v = static_cast<std::int32_t>(rng.uniform(numerics::kOneRaw));
    ds.add(FixedTensor(shape, std::move(raw)), rng.uniform(classes));
  }
  return ds;
}

FixedScalar covering_threshold(const std::vector<FixedTensor>& xs, std::size_t k) {
  auto points = selection::PointSet::from_tensors(xs);
  auto rep = selection::k_center_greedy(points, k);
  auto sq = selection::min_sq_distances(points, rep);
  u128 worst = *std::max_element(sq.begin(), sq.end());
  return FixedScalar::from_raw(points.to_distance(worst).raw() + 1);
}

Fixture make_fixture(const std::string& kind, std::size_t n, std::size_t k, std::uint64_t seed) {
  Drbg rng(seed);
  Drbg model_rng = rng.fork("model");
  Drbg data_rng = rng.fork("data");
  Fixture f;
  if (kind == "gaussians") {
    f.model = numerics::mlp(model_rng, 2, 16, 3);
    f.data = gaussian_blobs(data_rng, n, 3);
  } else if (kind == "digits") {
    f.model = numerics::mlp(model_rng, 64, 32, 10);
    f.data = digit_images(data_rng, n);
    for (auto& x : f.data.xs) x = x.reshaped({64});
  } else if (kind.rfind("mlp:", 0) == 0) {
    std::size_t in = 0, hidden = 0, classes = 0;
    char tail = 0;
    if (std::sscanf(kind.c_str(), "mlp:%zu:%zu:%zu%c", &in, &hidden, &classes, &tail) != 3 || in == 0 ||
        hidden == 0 || classes < 2) {
      fail(ErrorCode::InvalidConfig, "fixture kind must be mlp:inputs:hidden:classes");
    }
    f.model = numerics::mlp(model_rng, in, hidden, classes);
    f.data = gaussian_blobs(data_rng, n, classes, in);
  } else {
    f.model = numerics::build_architecture(kind, model_rng);
    f.data = random_images(data_rng, f.model.input_shape(), n, numerics::shape_size(f.model.output_shape()));
  }
  if (k > n) fail(ErrorCode::KTooLarge, "fixture k exceeds n");
  f.config.k = k;
  f.config.seed = seed;
  f.config.d = covering_threshold(f.data.xs, k);
  f.config.audit_b = protocol::AuditRequest{0, 0, 0.1, 0.8};
  f.config.audit_c = protocol::AuditRequest{0, 0, 0.1, 0.8};
  return f;
}

void save_fixture(const Fixture& f, const std::string& dir) {
  std::filesystem::create_directories(dir);
  numerics::save_model(f.model, dir + "/model.pvdm");
  selection::save_dataset(f.data, dir + "/dataset.pvdd");
  std::ofstream out(dir + "/config.json");
  if (!out) fail(ErrorCode::Io, "cannot write " + dir + "/config.json");
  out << f.config.to_json().dump(2) << "\n";
}

Fixture load_fixture(const std::string& dir) {
  Fixture f;
  f.model = numerics::load_model(dir + "/model.pvdm");
  f.data = selection::load_dataset(dir + "/dataset.pvdd");
  f.config = protocol::RunConfig::load(dir + "/config.json");
  return f;
}

}  // namespace privade::fixtures
