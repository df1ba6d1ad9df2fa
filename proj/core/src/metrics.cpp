#include "lmsbn/metrics.hpp"

#include "lmsbn/error.hpp"

namespace lmsbn {

namespace {

std::size_t check_shapes(std::span<const Labels> truths, std::span<const Labels> preds) {
  if (truths.size() != preds.size()) throw PreconditionError("truth and prediction counts differ");
  if (truths.empty()) throw PreconditionError("no instances to evaluate");
  const std::size_t width = truths.front().size();
  if (width == 0) throw PreconditionError("label vectors are empty");
  for (std::size_t l = 0; l < truths.size(); ++l) {
    if (truths[l].size() != width || preds[l].size() != width) {
      throw PreconditionError("instance " + std::to_string(l) + " has a different label count");
    }
    for (std::size_t i = 0; i < width; ++i) {
      if ((truths[l][i] != 1 && truths[l][i] != -1) || (preds[l][i] != 1 && preds[l][i] != -1)) {
        throw PreconditionError("labels must be +1 or -1");
      }
    }
  }
  return width;
}

double f_ratio(double both, double positives) { return positives == 0.0 ? 1.0 : 2.0 * both / positives; }

}  // namespace

std::vector<double> per_label_fscores(std::span<const Labels> truths, std::span<const Labels> preds) {
  const std::size_t width = check_shapes(truths, preds);
  std::vector<double> both(width, 0.0);
  std::vector<double> positives(width, 0.0);
  for (std::size_t l = 0; l < truths.size(); ++l) {
    for (std::size_t i = 0; i < width; ++i) {
      const bool t = truths[l][i] == 1;
      const bool p = preds[l][i] == 1;
      both[i] += (t && p) ? 1.0 : 0.0;
      positives[i] += (t ? 1.0 : 0.0) + (p ? 1.0 : 0.0);
    }
  }
  std::vector<double> scores(width);
  for (std::size_t i = 0; i < width; ++i) scores[i] = f_ratio(both[i], positives[i]);
  return scores;
}

MetricReport evaluate(std::span<const Labels> truths, std::span<const Labels> preds) {
  const std::size_t width = check_shapes(truths, preds);
  const auto n = static_cast<double>(truths.size());

  MetricReport report;
  double mismatches = 0.0;
  double all_both = 0.0;
  double all_positives = 0.0;
  for (std::size_t l = 0; l < truths.size(); ++l) {
    double both = 0.0;
    double positives = 0.0;
    bool exact = true;
    for (std::size_t i = 0; i < width; ++i) {
      const bool t = truths[l][i] == 1;
      const bool p = preds[l][i] == 1;
      if (t != p) {
        exact = false;
        mismatches += 1.0;
      }
      both += (t && p) ? 1.0 : 0.0;
      positives += (t ? 1.0 : 0.0) + (p ? 1.0 : 0.0);
    }
    report.exact_match += exact ? 1.0 : 0.0;
    report.f_sample += f_ratio(both, positives);
    all_both += both;
    all_positives += positives;
  }
  report.exact_match /= n;
  report.f_sample /= n;
  report.hamming = mismatches / (n * static_cast<double>(width));
  report.f_micro = f_ratio(all_both, all_positives);

  const auto labels = per_label_fscores(truths, preds);
  for (double f : labels) report.f_macro += f;
  report.f_macro /= static_cast<double>(width);
  return report;
}

}  // namespace lmsbn
