#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "hood/detect/detector.hpp"
#include "hood/metrics/metrics.hpp"
#include "hood/model/augment.hpp"

namespace hood::metrics {

struct CategoryMetrics {
  double auroc = 0.0;
  double aupr_in = 0.0;
  double aupr_out = 0.0;
  double fpr95 = 0.0;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  double id_accept_rate = 0.0;  // ID samples with verdict Presence
};

struct MetricsReport {
  CategoryMetrics static_activity;
  CategoryMetrics very_static;
  double ood_reject_rate = 0.0;  // OOD samples with verdict NoPresence
  std::optional<double> test_seconds;
};

/// Metrics of one category: ID samples of that category scored with their own
/// branch error against every OOD sample scored with the same branch.
CategoryMetrics category_metrics(std::span<const double> id_errors, std::span<const double> ood_errors);

/// Scores = negated combined errors. `errors[i]` belongs to `samples[i]`.
MetricsReport evaluate_errors(std::span<const model::TrainingSample> samples,
                              std::span<const detect::CombinedErrors> errors, const detect::Thresholds& thresholds);

template <typename T>
MetricsReport evaluate(const model::HoodModel<T>& model, const detect::Thresholds& thresholds,
                       std::span<const model::TrainingSample> test_samples);

/// Header and one row: per category auroc, aupr_in, aupr_out, fpr95, static
/// first, then test time in seconds (empty when not recorded).
std::string csv_header();
std::string csv_row(const MetricsReport& report);

}  // namespace hood::metrics
