#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "dsfusion/fusion_classifier.hpp"

namespace dsfusion {

inline constexpr int kModelFormatVersion = 1;

// Plain-text model document. Numbers are written with 17 significant digits
// so a save/load cycle reproduces every parameter bit for bit.
//
//   dsfusion-model 1
//   classes 3
//   class setosa
//   ...
//   attributes 4
//   attribute sepal_length
//   ...
//   bpa_mode proposed
//   components 2
//   model <class> <attribute> <weight> <mean> <stddev> ...
void save_model(const TrainedFusionClassifier& clf, std::ostream& out);
void save_model(const TrainedFusionClassifier& clf, const std::filesystem::path& path);

// Throws ParseError on malformed documents, FileNotFound for missing files.
TrainedFusionClassifier load_model(std::istream& in);
TrainedFusionClassifier load_model(const std::filesystem::path& path);

}  // namespace dsfusion
