#include "dsfusion/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "dsfusion/errors.hpp"

namespace dsfusion {

Dataset::Dataset(std::string name, std::vector<std::string> attributes, std::vector<std::string> classes,
                 std::vector<double> values, std::vector<std::size_t> labels)
    : Dataset(Unchecked{}, std::move(name), std::move(attributes), Frame(std::move(classes)), std::move(values),
              std::move(labels)) {
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw InvalidConfig("class '" + frame_.label(c) + "' has no rows");
  }
}

Dataset::Dataset(Unchecked, std::string name, std::vector<std::string> attributes, Frame frame,
                 std::vector<double> values, std::vector<std::size_t> labels)
    : name_(std::move(name)),
      attributes_(std::move(attributes)),
      frame_(std::move(frame)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  if (attributes_.empty()) throw InvalidConfig("dataset needs at least one attribute");
  if (values_.size() != labels_.size() * attributes_.size()) throw InvalidConfig("value matrix shape mismatch");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidConfig("dataset values must be finite");
  }
  for (std::size_t l : labels_) {
    if (l >= frame_.size()) throw InvalidConfig("class index out of range");
  }
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(frame_.size(), 0);
  for (std::size_t l : labels_) ++counts[l];
  return counts;
}

std::vector<std::size_t> Dataset::rows_of_class(std::size_t cls) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows(); ++r) {
    if (labels_[r] == cls) out.push_back(r);
  }
  return out;
}

std::vector<double> Dataset::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = value(r, c);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows_wanted) const {
  std::vector<double> vals;
  vals.reserve(rows_wanted.size() * cols());
  std::vector<std::size_t> labs;
  labs.reserve(rows_wanted.size());
  for (std::size_t r : rows_wanted) {
    const auto src = row(r);
    vals.insert(vals.end(), src.begin(), src.end());
    labs.push_back(labels_[r]);
  }
  return Dataset(Unchecked{}, name_, attributes_, frame_, std::move(vals), std::move(labs));
}

Dataset Dataset::with_values(std::vector<double> values) const {
  return Dataset(Unchecked{}, name_, attributes_, frame_, std::move(values), labels_);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

Dataset parse_csv(std::istream& in, std::string name, const CsvOptions& options) {
  std::vector<std::string> attributes;
  std::vector<std::string> classes;
  std::unordered_map<std::string, std::size_t> class_index;
  std::vector<double> values;
  std::vector<std::size_t> labels;

  std::size_t width = 0;
  std::size_t label_col = 0;
  bool have_shape = false;
  const auto set_shape = [&](std::size_t cells, std::size_t line_no) {
    width = cells;
    if (!options.labeled) {
      label_col = width;
      have_shape = true;
      return;
    }
    if (width < 2) throw ParseError("need at least one attribute column and a label column", line_no, 1);
    const long idx = options.label_column < 0 ? static_cast<long>(width) + options.label_column
                                              : static_cast<long>(options.label_column);
    if (idx < 0 || idx >= static_cast<long>(width)) {
      throw ParseError("label column out of range", line_no, static_cast<std::size_t>(std::abs(idx)) + 1);
    }
    label_col = static_cast<std::size_t>(idx);
    have_shape = true;
  };

  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split(line, options.delimiter);
    if (header_pending) {
      set_shape(cells.size(), line_no);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c != label_col) attributes.emplace_back(cells[c].empty() ? "x" + std::to_string(c + 1) : cells[c]);
      }
      header_pending = false;
      continue;
    }
    if (!have_shape) {
      set_shape(cells.size(), line_no);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c != label_col) attributes.push_back("x" + std::to_string(attributes.size() + 1));
      }
    }
    if (cells.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()), line_no,
                       std::min(cells.size(), width) + 1);
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto cell = cells[c];
      if (cell.empty() || cell == "?") throw MissingValue(line_no, c + 1);
      if (c == label_col) {
        const std::string key(cell);
        auto [it, inserted] = class_index.try_emplace(key, classes.size());
        if (inserted) classes.push_back(key);
        labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (*first == '+') ++first;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        throw NonNumeric(std::string(cell), line_no, c + 1);
      }
      values.push_back(v);
    }
  }
  if (!options.labeled && values.empty()) throw ParseError("no data rows", line_no == 0 ? 1 : line_no, 1);
  if (!options.labeled) {
    labels.assign(values.size() / attributes.size(), 0);
    classes = {"?"};
  }
  if (labels.empty()) throw ParseError("no data rows", line_no == 0 ? 1 : line_no, 1);
  return Dataset(std::move(name), std::move(attributes), std::move(classes), std::move(values), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return parse_csv(in, path.stem().string(), options);
}

TrainTestSplit split_fraction(const Dataset& data, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidConfig("train fraction must lie in (0, 1)");
  TrainTestSplit out;
  for (std::size_t cls = 0; cls < data.classes(); ++cls) {
    auto rows = data.rows_of_class(cls);
    const auto n = rows.size();
    // The small slack keeps e.g. 0.7 * 50 at 35 despite binary rounding.
    const auto n_train = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    if (n_train == 0 || n_train >= n) {
      throw InsufficientData("class '" + data.frame().label(cls) + "' with " + std::to_string(n) +
                             " rows cannot be split at fraction " + std::to_string(fraction));
    }
    shuffle(std::span<std::size_t>(rows), rng);
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data, std::size_t k, Rng& rng) {
  if (k < 2) throw InvalidConfig("need at least 2 folds");
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (std::size_t cls = 0; cls < data.classes(); ++cls) {
    auto rows = data.rows_of_class(cls);
    if (rows.size() < k) {
      throw InsufficientData("class '" + data.frame().label(cls) + "' has " + std::to_string(rows.size()) +
                             " rows, fewer than the " + std::to_string(k) + " folds requested");
    }
    shuffle(std::span<std::size_t>(rows), rng);
    for (std::size_t r : rows) {
      folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

MinMaxScaler::MinMaxScaler(const Dataset& fit_on) : lo_(fit_on.cols()), scale_(fit_on.cols()) {
  for (std::size_t c = 0; c < fit_on.cols(); ++c) {
    const auto col = fit_on.column(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    lo_[c] = col.empty() ? 0.0 : *lo;
    const double range = col.empty() ? 0.0 : *hi - *lo;
    scale_[c] = range > 0.0 ? 1.0 / range : 1.0;
  }
}

void MinMaxScaler::apply(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - lo_[c]) * scale_[c];
}

Dataset MinMaxScaler::apply(const Dataset& data) const {
  std::vector<double> vals(data.values().begin(), data.values().end());
  for (std::size_t r = 0; r < data.rows(); ++r) apply(std::span<double>(vals.data() + r * data.cols(), data.cols()));
  return data.with_values(std::move(vals));
}

}  // namespace dsfusion
