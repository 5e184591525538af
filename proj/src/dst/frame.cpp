#include "dsfusion/frame.hpp"

#include <unordered_set>

#include "dsfusion/errors.hpp"

namespace dsfusion {

Frame::Frame(std::vector<std::string> labels) {
  if (labels.empty() || labels.size() > kMaxFrameSize) {
    throw InvalidConfig("frame must have between 1 and " + std::to_string(kMaxFrameSize) +
                        " classes, got " + std::to_string(labels.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw InvalidConfig("frame labels must be nonempty");
    if (!seen.insert(l).second) throw InvalidConfig("duplicate frame label '" + l + "'");
  }
  labels_ = std::make_shared<const std::vector<std::string>>(std::move(labels));
}

Frame Frame::anonymous(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
  return Frame(std::move(labels));
}

std::size_t Frame::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if ((*labels_)[i] == label) return i;
  }
  throw InvalidConfig("unknown class label '" + std::string(label) + "'");
}

std::string Frame::format(Subset s) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!s.contains(i)) continue;
    if (!first) out += ',';
    out += label(i);
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace dsfusion
