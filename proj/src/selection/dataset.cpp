#include "privade/selection/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "privade/common/errors.hpp"
#include "privade/numerics/model_io.hpp"

namespace privade::selection {

namespace {
constexpr char kMagic[4] = {'P', 'V', 'D', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

FixedTensor one_hot(std::size_t label, std::size_t classes) {
  if (label >= classes) fail(ErrorCode::IndexOutOfRange, "label outside class range");
  FixedTensor t({classes});
  t.raw()[label] = static_cast<std::int32_t>(numerics::kOneRaw);
  return t;
}

std::size_t Dataset::class_of(std::size_t i) const {
  auto r = ys.at(i).raw();
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

void Dataset::add(FixedTensor x, std::size_t label) {
  xs.push_back(std::move(x));
  ys.push_back(one_hot(label, num_classes));
}

void Dataset::validate() const {
  if (xs.empty()) fail(ErrorCode::EmptyInput, "dataset is empty");
  if (xs.size() != ys.size()) fail(ErrorCode::ShapeMismatch, "features and labels differ in count");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].shape() != xs[0].shape()) fail(ErrorCode::ShapeMismatch, "non-uniform feature shape");
    if (ys[i].shape() != Shape{num_classes}) fail(ErrorCode::ShapeMismatch, "label width mismatch");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.num_classes = num_classes;
  for (std::size_t i : indices) {
    out.xs.push_back(xs.at(i));
    out.ys.push_back(ys.at(i));
  }
  return out;
}

Bytes encode_dataset(const Dataset& ds) {
  ds.validate();
  nlohmann::json manifest = {{"n", ds.size()},
                             {"feature_shape", ds.feature_shape()},
                             {"num_classes", ds.num_classes},
                             {"label_encoding", "onehot"},
                             {"qformat", "Q16.16"}};
  std::string text = manifest.dump();
  ByteWriter w;
  w.raw(as_bytes(std::string_view(kMagic, 4)));
  w.u32_le(kVersion);
  w.u32_le(static_cast<std::uint32_t>(text.size()));
  w.raw(as_bytes(text));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::int32_t v : ds.xs[i].raw()) w.i32_le(v);
    for (std::int32_t v : ds.ys[i].raw()) w.i32_le(v);
  }
  return std::move(w).take();
}

Dataset decode_dataset(ByteView bytes) {
  ByteReader r(bytes);
  ByteView magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) fail(ErrorCode::Malformed, "not a dataset file");
  if (r.u32_le() != kVersion) fail(ErrorCode::Malformed, "unsupported dataset file version");
  ByteView text = r.raw(r.u32_le());
  Dataset ds;
  try {
    auto manifest = nlohmann::json::parse(text.begin(), text.end());
    auto n = manifest.at("n").get<std::size_t>();
    auto shape = manifest.at("feature_shape").get<Shape>();
    ds.num_classes = manifest.at("num_classes").get<std::size_t>();
    std::size_t per = numerics::shape_size(shape);
    if (n == 0 || ds.num_classes == 0) fail(ErrorCode::Malformed, "empty dataset manifest");
    if ((per + ds.num_classes) * 4 * n != r.remaining()) fail(ErrorCode::Malformed, "dataset body size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::int32_t> x(per), y(ds.num_classes);
      for (auto& v : x) v = r.i32_le();
      for (auto& v : y) v = r.i32_le();
      ds.xs.emplace_back(shape, std::move(x));
      ds.ys.emplace_back(Shape{ds.num_classes}, std::move(y));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Malformed, std::string("dataset manifest: ") + e.what());
  }
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  numerics::write_file(path, encode_dataset(ds));
}

Dataset load_dataset(const std::string& path) { return decode_dataset(numerics::read_file(path)); }

Dataset import_csv(const std::string& text, std::size_t num_classes) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  std::size_t max_label = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::size_t label = 0;
    auto [p, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), label);
    if (ec != std::errc() || p != cells[0].data() + cells[0].size()) {
      if (first) {
        first = false;
        continue;
      }
      fail(ErrorCode::Malformed, "bad label '" + cells[0] + "'");
    }
    first = false;
    std::vector<double> feats;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        feats.push_back(std::stod(cells[c], &used));
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorCode::Malformed, "bad feature '" + cells[c] + "'");
      }
    }
    if (feats.empty()) fail(ErrorCode::Malformed, "row without features");
    if (!rows.empty() && feats.size() != rows.front().second.size()) {
      fail(ErrorCode::ShapeMismatch, "CSV rows differ in width");
    }
    max_label = std::max(max_label, label);
    rows.emplace_back(label, std::move(feats));
  }
  if (rows.empty()) fail(ErrorCode::EmptyInput, "CSV has no rows");
  Dataset ds;
  ds.num_classes = num_classes ? num_classes : max_label + 1;
  for (auto& [label, feats] : rows) {
    ds.add(FixedTensor::from_doubles({feats.size()}, feats), label);
  }
  ds.validate();
  return ds;
}

}  // namespace privade::selection
