#pragma once

#include <span>
#include <vector>

#include "lmsbn/model.hpp"

namespace lmsbn {

/// The five multi-label measures. Every F ratio whose denominator is zero
/// (no true and no predicted positives) counts as 1.
struct MetricReport {
  double exact_match = 0.0;
  double hamming = 0.0;
  double f_sample = 0.0;
  double f_macro = 0.0;
  double f_micro = 0.0;
};

/// Throws PreconditionError on count or width mismatch or labels outside {-1,+1}.
MetricReport evaluate(std::span<const Labels> truths, std::span<const Labels> preds);

/// F score of each label over the instances (the terms averaged by f_macro).
std::vector<double> per_label_fscores(std::span<const Labels> truths, std::span<const Labels> preds);

}  // namespace lmsbn
