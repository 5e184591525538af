#include "dsfusion/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dsfusion/errors.hpp"

namespace dsfusion {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Labels may contain spaces; everything after the keyword and one space is the label.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string expect(std::string_view keyword) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      if (line.compare(0, keyword.size(), keyword) != 0 ||
          (line.size() > keyword.size() && line[keyword.size()] != ' ')) {
        throw ParseError("expected '" + std::string(keyword) + "'", line_no_, 1);
      }
      return line.size() > keyword.size() ? line.substr(keyword.size() + 1) : std::string();
    }
    throw ParseError("unexpected end of model file, expected '" + std::string(keyword) + "'", line_no_ + 1, 1);
  }

  template <class T>
  T number(std::string_view s) const {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError("bad number '" + std::string(s) + "'", line_no_, 1);
    }
    return v;
  }

  std::vector<std::string_view> words(std::string_view s) const {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && s[i] == ' ') ++i;
      const auto b = i;
      while (i < s.size() && s[i] != ' ') ++i;
      if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_model(const TrainedFusionClassifier& clf, std::ostream& out) {
  const auto& frame = clf.frame();
  out << "dsfusion-model " << kModelFormatVersion << '\n';
  out << "classes " << frame.size() << '\n';
  for (const auto& l : frame.labels()) out << "class " << l << '\n';
  out << "attributes " << clf.attribute_count() << '\n';
  for (const auto& a : clf.attributes()) out << "attribute " << a << '\n';
  out << "bpa_mode " << to_string(clf.bpa_mode()) << '\n';
  out << "components " << clf.components() << '\n';
  for (std::size_t cls = 0; cls < frame.size(); ++cls) {
    for (std::size_t attr = 0; attr < clf.attribute_count(); ++attr) {
      out << "model " << cls << ' ' << attr;
      for (const auto& c : clf.model(cls, attr).components()) {
        out << ' ' << g17(c.weight) << ' ' << g17(c.mean) << ' ' << g17(c.stddev);
      }
      out << '\n';
    }
  }
}

void save_model(const TrainedFusionClassifier& clf, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file: " + path.string());
  save_model(clf, out);
  if (!out) throw Error("failed writing model file: " + path.string());
}

TrainedFusionClassifier load_model(std::istream& in) {
  Reader rd(in);
  const auto version = rd.expect("dsfusion-model");
  if (rd.number<int>(version) != kModelFormatVersion) {
    throw ParseError("unsupported model format version " + version, rd.line(), 16);
  }
  const auto n = rd.number<std::size_t>(rd.expect("classes"));
  if (n == 0 || n > kMaxFrameSize) throw ParseError("class count out of range", rd.line(), 9);
  std::vector<std::string> classes;
  for (std::size_t i = 0; i < n; ++i) classes.push_back(rd.expect("class"));
  const auto k = rd.number<std::size_t>(rd.expect("attributes"));
  if (k == 0) throw ParseError("model has no attributes", rd.line(), 12);
  std::vector<std::string> attributes;
  for (std::size_t j = 0; j < k; ++j) attributes.push_back(rd.expect("attribute"));
  const auto mode_text = rd.expect("bpa_mode");
  const auto mode = parse_bpa_mode(mode_text);
  if (!mode) throw ParseError("unknown bpa_mode '" + mode_text + "'", rd.line(), 10);
  const int y = rd.number<int>(rd.expect("components"));
  if (y < 1) throw ParseError("component count must be at least 1", rd.line(), 12);

  std::vector<std::optional<MembershipModel>> grid(n * k);
  for (std::size_t e = 0; e < n * k; ++e) {
    const auto line = rd.expect("model");
    const auto w = rd.words(line);
    if (w.size() != 2 + 3 * static_cast<std::size_t>(y)) {
      throw ParseError("model line needs class, attribute and " + std::to_string(y) + " components", rd.line(), 1);
    }
    const auto cls = rd.number<std::size_t>(w[0]);
    const auto attr = rd.number<std::size_t>(w[1]);
    if (cls >= n || attr >= k) throw ParseError("model cell out of range", rd.line(), 7);
    if (grid[cls * k + attr]) throw ParseError("duplicate model cell", rd.line(), 7);
    std::vector<GaussianComponent> comps;
    for (int c = 0; c < y; ++c) {
      const auto base = 2 + 3 * static_cast<std::size_t>(c);
      comps.push_back({rd.number<double>(w[base]), rd.number<double>(w[base + 1]), rd.number<double>(w[base + 2])});
    }
    try {
      grid[cls * k + attr] = MembershipModel(std::move(comps));
    } catch (const InvalidConfig& e) {
      throw ParseError(e.what(), rd.line(), 1);
    }
  }
  std::vector<MembershipModel> models;
  models.reserve(grid.size());
  for (auto& m : grid) models.push_back(std::move(*m));
  return TrainedFusionClassifier(Frame(std::move(classes)), std::move(attributes), *mode, y, std::move(models));
}

TrainedFusionClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return load_model(in);
}

}  // namespace dsfusion
