#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmsbn/graph.hpp"
#include "lmsbn/inference.hpp"
#include "lmsbn/model.hpp"

namespace lmsbn {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a whole token; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view token);

// ---------------------------------------------------------------------------
// Multi-label svmlight files
//
//   <label>,<label>,... <index>:<value> <index>:<value> ...
//
// Labels and feature indices are 1-based (label_base shifts labels, e.g. 0
// for files that number classes from zero). Listed labels are +1, absent
// ones -1. The label field may be empty. Blank lines and lines starting with
// '#' are skipped; text after '#' on a data line is ignored.
// ---------------------------------------------------------------------------

struct SvmlightOptions {
  /// Fixes K; a label id above it is an error. Otherwise K is the largest id seen.
  std::optional<int> num_outputs;
  /// Fixes D; a feature index above it is an error. Otherwise D is the largest index seen.
  std::optional<int> input_dim;
  int label_base = 1;
};

Dataset read_multilabel_svmlight(std::istream& in, const SvmlightOptions& options = {});
Dataset parse_multilabel_svmlight(const std::filesystem::path& path, const SvmlightOptions& options = {});

/// Writes labels 1-based and only non-zero features, values in shortest
/// round-trip form.
void write_multilabel_svmlight(std::ostream& out, const Dataset& data);

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

struct TrainingInfo {
  int epochs = 0;
  double final_gap = 0.0;

  bool operator==(const TrainingInfo&) const = default;
};

/// Per-feature min-max map onto [-1, 1]; constant features map to 0.
struct FeatureScaling {
  std::vector<double> min;
  std::vector<double> max;

  static FeatureScaling fit(const Dataset& data);
  void apply(std::vector<double>& x) const;
  void apply(Dataset& data) const;

  bool operator==(const FeatureScaling&) const = default;
};

struct ModelFile {
  GraphSpec graph;
  WeightVector weights;
  TrainingInfo info;
  std::optional<FeatureScaling> scaling;
};

void write_model(std::ostream& out, const ModelFile& model);
ModelFile read_model(std::istream& in);
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Prediction files: one line per instance,
//
//   +1 -1 +1 loss=<float> states=<int> status=<word>
// ---------------------------------------------------------------------------

struct PredictionLine {
  Labels y;
  double loss = 0.0;
  std::uint64_t states = 0;
  InferenceStatus status = InferenceStatus::proven_optimal;
};

void write_prediction(std::ostream& out, const InferenceResult& result);
std::vector<PredictionLine> read_predictions(std::istream& in);

}  // namespace lmsbn
