#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hood/metrics/evaluate.hpp"
#include "hood/metrics/metrics.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace hood;
using namespace hood::metrics;
using radar::Category;

namespace {

std::vector<ScoredSample> from_errors(const std::vector<double>& id, const std::vector<double>& ood) {
  std::vector<ScoredSample> out;
  for (double e : id) out.push_back({-e, Label::id});
  for (double e : ood) out.push_back({-e, Label::ood});
  return out;
}

std::vector<oracle::Scored> to_oracle(const std::vector<ScoredSample>& s) {
  std::vector<oracle::Scored> out;
  for (const auto& x : s) out.push_back({x.score, x.label == Label::id});
  return out;
}

}  // namespace

TEST_CASE("metric examples") {
  const auto perfect = from_errors({0.1, 0.2}, {0.8, 0.9});
  CHECK(auroc(perfect) == 1.0);
  CHECK(aupr(perfect, Label::id) == 1.0);
  CHECK(aupr(perfect, Label::ood) == 1.0);
  CHECK(fpr_at_tpr(perfect) == 0.0);

  const auto ties = from_errors({0.5, 0.5, 0.5}, {0.5, 0.5});
  CHECK(auroc(ties) == 0.5);
  CHECK(fpr_at_tpr(ties) == 1.0);

  const auto mixed = from_errors({0.1, 0.2, 0.3, 0.9}, {0.25, 0.8, 1.0, 1.2});
  CHECK(auroc(mixed) == doctest::Approx(13.0 / 16.0).epsilon(1e-15));
  CHECK(fpr_at_tpr(mixed) == 0.5);
  CHECK(aupr(mixed, Label::id) == doctest::Approx(0.25 + 0.25 + 0.25 * 0.75 + 0.25 * 4.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(aupr(mixed, Label::id) - oracle::aupr(to_oracle(mixed), true)) < 1e-9);
  CHECK(std::abs(aupr(mixed, Label::ood) - oracle::aupr(to_oracle(mixed), false)) < 1e-9);
  CHECK(std::abs(fpr_at_tpr(mixed) - oracle::fpr_at_tpr(to_oracle(mixed), 0.95)) < 1e-9);

  const std::vector<ScoredSample> all_id{{0.3, Label::id}, {-2.0, Label::id}, {1.0, Label::id}};
  CHECK(aupr(all_id, Label::id) == 1.0);
  CHECK_THROWS_AS(aupr(all_id, Label::ood), ValidationError);
  CHECK_THROWS_AS(auroc(all_id), ValidationError);
  CHECK_THROWS_AS(fpr_at_tpr(all_id), ValidationError);
  CHECK_THROWS_AS(auroc(from_errors({std::nan("")}, {1.0})), ValidationError);
}

TEST_CASE("metrics match brute-force oracles on random instances") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(2, 50);
  std::uniform_int_distribution<int> coarse(0, 6);
  std::normal_distribution<double> fine(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    const int n = size(rng);
    std::vector<ScoredSample> s;
    for (int i = 0; i < n; ++i) {
      // Half of the instances use a coarse grid so ties are common.
      const double score = trial % 2 ? coarse(rng) * 0.5 : fine(rng);
      s.push_back({score, (i == 0 || (i != 1 && fine(rng) > 0.0)) ? Label::id : Label::ood});
    }
    const auto o = to_oracle(s);
    CHECK(std::abs(auroc(s) - oracle::auroc(o)) < 1e-9);
    CHECK(std::abs(aupr(s, Label::id) - oracle::aupr(o, true)) < 1e-9);
    CHECK(std::abs(aupr(s, Label::ood) - oracle::aupr(o, false)) < 1e-9);
    CHECK(std::abs(fpr_at_tpr(s) - oracle::fpr_at_tpr(o, 0.95)) < 1e-9);
    for (double v : {auroc(s), aupr(s, Label::id), aupr(s, Label::ood), fpr_at_tpr(s)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("metric invariances") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ScoredSample> s;
    for (int i = 0; i < 40; ++i) s.push_back({g(rng) + (i % 2 ? 0.7 : 0.0), i % 2 ? Label::id : Label::ood});
    const double a = auroc(s), pi = aupr(s, Label::id), po = aupr(s, Label::ood), f = fpr_at_tpr(s);

    auto mono = s;
    for (auto& x : mono) x.score = std::exp(3.0 * x.score) + 5.0;
    CHECK(auroc(mono) == doctest::Approx(a).epsilon(1e-12));
    CHECK(aupr(mono, Label::id) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(aupr(mono, Label::ood) == doctest::Approx(po).epsilon(1e-12));
    CHECK(fpr_at_tpr(mono) == doctest::Approx(f).epsilon(1e-12));

    auto shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(auroc(shuffled) == doctest::Approx(a).epsilon(1e-12));
    CHECK(aupr(shuffled, Label::id) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(fpr_at_tpr(shuffled) == f);

    auto swapped = s;
    for (auto& x : swapped) x.label = x.label == Label::id ? Label::ood : Label::id;
    CHECK(auroc(swapped) == doctest::Approx(1.0 - a).epsilon(1e-12));
  }
}

TEST_CASE("evaluate on separable errors") {
  std::mt19937_64 rng(3);
  const auto samples = synthetic::samples(6, 8, rng, true);
  std::vector<detect::CombinedErrors> errors;
  for (const auto& s : samples) {
    const bool ood = s.category == Category::ood;
    errors.push_back({ood ? 1.0 + 0.01 * static_cast<double>(errors.size()) : 0.01,
                      ood ? 2.0 : 0.001 * static_cast<double>(errors.size())});
  }
  detect::Thresholds t;
  t.threshold_s = 0.5;
  t.threshold_vs = 0.5;
  const auto r = evaluate_errors(samples, errors, t);
  for (const auto* c : {&r.static_activity, &r.very_static}) {
    CHECK(c->auroc == 1.0);
    CHECK(c->aupr_in == 1.0);
    CHECK(c->aupr_out == 1.0);
    CHECK(c->fpr95 == 0.0);
    CHECK(c->n_id == 6);
    CHECK(c->n_ood == 6);
    CHECK(c->id_accept_rate == 1.0);
  }
  CHECK(r.ood_reject_rate == 1.0);
  CHECK_FALSE(r.test_seconds.has_value());

  CHECK_THROWS_AS(evaluate_errors({}, {}, t), ValidationError);
  CHECK_THROWS_AS(evaluate_errors(samples, std::span(errors).first(3), t), ShapeError);
}

TEST_CASE("evaluate with a model is repeatable and scores each category with its own branch") {
  const auto m = model::build_model<double>({16, 8}, 4);
  std::mt19937_64 rng(4);
  const auto samples = synthetic::samples(5, 16, rng, true);
  std::vector<model::TrainingSample> id;
  for (const auto& s : samples)
    if (s.category != Category::ood) id.push_back(s);
  const auto t = detect::calibrate(m, std::span<const model::TrainingSample>(id), 0.9);

  const auto a = evaluate(m, t, std::span<const model::TrainingSample>(samples));
  const auto b = evaluate(m, t, std::span<const model::TrainingSample>(samples));
  REQUIRE(a.test_seconds.has_value());
  CHECK(*a.test_seconds >= 0.0);
  CHECK(a.static_activity.auroc == b.static_activity.auroc);
  CHECK(a.very_static.aupr_out == b.very_static.aupr_out);
  CHECK(a.ood_reject_rate == b.ood_reject_rate);

  const auto errs = detect::combined_errors(m, std::span<const model::TrainingSample>(samples));
  std::vector<double> s_id, vs_id, s_ood, vs_ood;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].category == Category::static_activity) s_id.push_back(errs[i].err_s);
    if (samples[i].category == Category::very_static) vs_id.push_back(errs[i].err_vs);
    if (samples[i].category == Category::ood) {
      s_ood.push_back(errs[i].err_s);
      vs_ood.push_back(errs[i].err_vs);
    }
  }
  const auto cs = category_metrics(s_id, s_ood);
  const auto cv = category_metrics(vs_id, vs_ood);
  CHECK(a.static_activity.auroc == cs.auroc);
  CHECK(a.static_activity.fpr95 == cs.fpr95);
  CHECK(a.very_static.auroc == cv.auroc);
  CHECK(a.very_static.aupr_in == cv.aupr_in);
  CHECK(a.static_activity.n_id == 5);
  CHECK(a.very_static.n_ood == 5);

  std::vector<model::TrainingSample> unlabeled(samples.begin(), samples.begin() + 2);
  unlabeled[0].category = Category::unlabeled;
  CHECK_THROWS_AS(evaluate(m, t, std::span<const model::TrainingSample>(unlabeled)), ValidationError);
}

TEST_CASE("csv format") {
  CHECK(csv_header() ==
        "static_auroc,static_aupr_in,static_aupr_out,static_fpr95,"
        "very_static_auroc,very_static_aupr_in,very_static_aupr_out,very_static_fpr95,test_time_s");
  MetricsReport r;
  r.static_activity = {0.5, 0.25, 0.125, 1.0, 1, 1, 0.0};
  r.very_static = {1.0, 1.0, 1.0, 0.0, 1, 1, 0.0};
  CHECK(csv_row(r) == "0.500000,0.250000,0.125000,1.000000,1.000000,1.000000,1.000000,0.000000,");
  r.test_seconds = 1.23456;
  CHECK(csv_row(r) == "0.500000,0.250000,0.125000,1.000000,1.000000,1.000000,1.000000,0.000000,1.235");
}
