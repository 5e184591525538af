#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "dsfusion/frame.hpp"
#include "dsfusion/rng.hpp"

namespace dsfusion {

// Numeric attribute matrix (row-major) with one class index per row.
class Dataset {
 public:
  Dataset(std::string name, std::vector<std::string> attributes, std::vector<std::string> classes,
          std::vector<double> values, std::vector<std::size_t> labels);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const Frame& frame() const { return frame_; }
  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return attributes_.size(); }
  std::size_t classes() const { return frame_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
  double value(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  std::span<const std::size_t> labels() const { return labels_; }
  std::size_t label(std::size_t r) const { return labels_[r]; }

  std::vector<std::size_t> class_counts() const;
  std::vector<std::size_t> rows_of_class(std::size_t cls) const;
  std::vector<double> column(std::size_t c) const;

  // Rows in the given order. Keeps the full frame even if a class ends up empty.
  Dataset subset(std::span<const std::size_t> rows) const;

  Dataset with_values(std::vector<double> values) const;

 private:
  // Skips the every-class-has-a-row check; used for subsets.
  struct Unchecked {};
  Dataset(Unchecked, std::string name, std::vector<std::string> attributes, Frame frame, std::vector<double> values,
          std::vector<std::size_t> labels);

  std::string name_;
  std::vector<std::string> attributes_;
  Frame frame_;
  std::vector<double> values_;
  std::vector<std::size_t> labels_;
};

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  // Column holding the class label; negative counts from the end (-1 = last).
  int label_column = -1;
  // Without labels every column is an attribute and all rows land in a single
  // placeholder class named "?".
  bool labeled = true;
};

// Class indices follow first appearance. Throws ParseError, MissingValue or
// NonNumeric with 1-based line/column; FileNotFound when the file cannot be
// opened. Empty cells and "?" count as missing.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, std::string name, const CsvOptions& options = {});

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, ceil(fraction * count) shuffled rows go to training and the rest
// to testing. Every class must keep at least one row on each side.
TrainTestSplit split_fraction(const Dataset& data, double fraction, Rng& rng);

// Stratified, shuffled k-fold partition. Per class, members are dealt to
// folds round-robin starting where the previous class stopped, so per-class
// and total fold sizes each differ by at most one. Throws InsufficientData
// when a class has fewer than k rows.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data, std::size_t k, Rng& rng);

// Min-max scaling fitted on one dataset and applied to others.
class MinMaxScaler {
 public:
  explicit MinMaxScaler(const Dataset& fit_on);
  void apply(std::span<double> row) const;
  Dataset apply(const Dataset& data) const;

 private:
  std::vector<double> lo_;
  std::vector<double> scale_;
};

}  // namespace dsfusion
