#include "hood/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hood/error.hpp"

namespace hood::metrics {

namespace {

struct Counts {
  std::size_t id = 0;
  std::size_t ood = 0;
};

Counts count_labels(std::span<const ScoredSample> samples) {
  Counts c;
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) throw ValidationError("metrics: non-finite score");
    (s.label == Label::id ? c.id : c.ood)++;
  }
  return c;
}

void require_both_classes(const Counts& c, const char* what) {
  if (c.id == 0 || c.ood == 0) {
    throw ValidationError(std::string(what) + ": needs at least one ID and one OOD sample");
  }
}

/// Samples grouped by equal score, highest score first. Each group reports
/// how many ID and OOD samples share that score.
std::vector<Counts> descending_groups(std::span<const ScoredSample> samples, bool negate) {
  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  if (negate) {
    for (auto& s : sorted) s.score = -s.score;
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  std::vector<Counts> groups;
  for (std::size_t i = 0; i < sorted.size();) {
    Counts g;
    std::size_t j = i;
    for (; j < sorted.size() && sorted[j].score == sorted[i].score; ++j) (sorted[j].label == Label::id ? g.id : g.ood)++;
    groups.push_back(g);
    i = j;
  }
  return groups;
}

}  // namespace

double auroc(std::span<const ScoredSample> samples) {
  const auto totals = count_labels(samples);
  require_both_classes(totals, "auroc");
  // Walk from the lowest score up; OOD seen so far sit strictly below.
  auto groups = descending_groups(samples, false);
  std::reverse(groups.begin(), groups.end());
  double u = 0.0;
  std::size_t ood_below = 0;
  for (const auto& g : groups) {
    u += static_cast<double>(g.id) * (static_cast<double>(ood_below) + 0.5 * static_cast<double>(g.ood));
    ood_below += g.ood;
  }
  return u / (static_cast<double>(totals.id) * static_cast<double>(totals.ood));
}

double aupr(std::span<const ScoredSample> samples, Label positive) {
  const auto totals = count_labels(samples);
  const std::size_t n_pos = positive == Label::id ? totals.id : totals.ood;
  if (n_pos == 0) throw ValidationError("aupr: no positive samples");
  const auto groups = descending_groups(samples, positive == Label::ood);
  double area = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::size_t predicted = 0;
  for (const auto& g : groups) {
    tp += positive == Label::id ? g.id : g.ood;
    predicted += g.id + g.ood;
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

double fpr_at_tpr(std::span<const ScoredSample> samples, double tpr_target) {
  const auto totals = count_labels(samples);
  require_both_classes(totals, "fpr_at_tpr");
  if (!(tpr_target > 0.0 && tpr_target <= 1.0)) throw ValidationError("fpr_at_tpr: target must lie in (0, 1]");
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const auto& g : descending_groups(samples, false)) {
    tp += g.id;
    fp += g.ood;
    if (static_cast<double>(tp) >= tpr_target * static_cast<double>(totals.id) - 1e-9) break;
  }
  return static_cast<double>(fp) / static_cast<double>(totals.ood);
}

}  // namespace hood::metrics
