#include "hood/metrics/evaluate.hpp"

#include <chrono>
#include <cstdio>
#include <vector>

#include "hood/model/trainer.hpp"

namespace hood::metrics {

CategoryMetrics category_metrics(std::span<const double> id_errors, std::span<const double> ood_errors) {
  std::vector<ScoredSample> scored;
  scored.reserve(id_errors.size() + ood_errors.size());
  for (double e : id_errors) scored.push_back({-e, Label::id});
  for (double e : ood_errors) scored.push_back({-e, Label::ood});
  CategoryMetrics m;
  m.n_id = id_errors.size();
  m.n_ood = ood_errors.size();
  m.auroc = auroc(scored);
  m.aupr_in = aupr(scored, Label::id);
  m.aupr_out = aupr(scored, Label::ood);
  m.fpr95 = fpr_at_tpr(scored, 0.95);
  return m;
}

MetricsReport evaluate_errors(std::span<const model::TrainingSample> samples,
                              std::span<const detect::CombinedErrors> errors, const detect::Thresholds& thresholds) {
  if (samples.empty()) throw ValidationError("evaluate: empty dataset");
  if (samples.size() != errors.size()) throw ShapeError("evaluate: error count differs from sample count");
  std::vector<double> id_s, id_vs, ood_s, ood_vs;
  std::size_t accepted_s = 0, accepted_vs = 0, rejected_ood = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto verdict = detect::infer(errors[i], thresholds);
    switch (samples[i].category) {
      case radar::Category::static_activity:
        id_s.push_back(errors[i].err_s);
        accepted_s += verdict == detect::Verdict::presence;
        break;
      case radar::Category::very_static:
        id_vs.push_back(errors[i].err_vs);
        accepted_vs += verdict == detect::Verdict::presence;
        break;
      case radar::Category::ood:
        ood_s.push_back(errors[i].err_s);
        ood_vs.push_back(errors[i].err_vs);
        rejected_ood += verdict == detect::Verdict::no_presence;
        break;
      default:
        throw ValidationError("evaluate: every test sample needs a static, very_static or ood label");
    }
  }
  MetricsReport r;
  r.static_activity = category_metrics(id_s, ood_s);
  r.very_static = category_metrics(id_vs, ood_vs);
  r.static_activity.id_accept_rate = static_cast<double>(accepted_s) / static_cast<double>(id_s.size());
  r.very_static.id_accept_rate = static_cast<double>(accepted_vs) / static_cast<double>(id_vs.size());
  r.ood_reject_rate = static_cast<double>(rejected_ood) / static_cast<double>(ood_s.size());
  return r;
}

template <typename T>
MetricsReport evaluate(const model::HoodModel<T>& model, const detect::Thresholds& thresholds,
                       std::span<const model::TrainingSample> test_samples) {
  if (test_samples.empty()) throw ValidationError("evaluate: empty dataset");
  thresholds.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto errors = detect::combined_errors(model, test_samples);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto report = evaluate_errors(test_samples, errors, thresholds);
  report.test_seconds = seconds;
  return report;
}

std::string csv_header() {
  return "static_auroc,static_aupr_in,static_aupr_out,static_fpr95,"
         "very_static_auroc,very_static_aupr_in,very_static_aupr_out,very_static_fpr95,test_time_s";
}

std::string csv_row(const MetricsReport& report) {
  std::string row;
  char buf[64];
  for (const auto* c : {&report.static_activity, &report.very_static}) {
    for (double v : {c->auroc, c->aupr_in, c->aupr_out, c->fpr95}) {
      std::snprintf(buf, sizeof buf, "%.6f,", v);
      row += buf;
    }
  }
  if (report.test_seconds) {
    std::snprintf(buf, sizeof buf, "%.3f", *report.test_seconds);
    row += buf;
  }
  return row;
}

template MetricsReport evaluate<float>(const model::HoodModel<float>&, const detect::Thresholds&,
                                       std::span<const model::TrainingSample>);
template MetricsReport evaluate<double>(const model::HoodModel<double>&, const detect::Thresholds&,
                                        std::span<const model::TrainingSample>);

}  // namespace hood::metrics
