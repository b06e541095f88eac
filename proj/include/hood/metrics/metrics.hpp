#pragma once

#include <span>
#include <string>
#include <vector>

namespace hood::metrics {

enum class Label { id, ood };

/// Higher score = more in-distribution.
struct ScoredSample {
  double score = 0.0;
  Label label = Label::id;
};

/// Mann-Whitney AUROC with ID as the positive class; ties count one half.
double auroc(std::span<const ScoredSample> samples);

/// Step-curve average precision over all distinct thresholds. With
/// `positive = ood` the sweep runs over ascending ID-affinity.
double aupr(std::span<const ScoredSample> samples, Label positive);

/// FPR at the first threshold, sweeping from the highest score down, whose
/// TPR (ID positive) reaches `tpr_target`.
double fpr_at_tpr(std::span<const ScoredSample> samples, double tpr_target = 0.95);

}  // namespace hood::metrics
