#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "papermatch/corpus.hpp"
#include "papermatch/lr.hpp"

using namespace papermatch;

namespace {

DocumentVector doc(std::initializer_list<std::pair<int, long long>> counts) {
  DocumentVector d;
  for (const auto& [term, count] : counts) d.add_term(term, count);
  return d;
}

// Planted linear data: x ~ counts, s = theta* . x (+ noise), kept inside the
// score range so prediction clipping stays inactive.
struct Planted {
  std::vector<DocumentVector> docs;
  std::vector<TrainExample> train;
  std::vector<TrainExample> test;
  Eigen::VectorXd theta_star;
};

Planted plant(int n_features, int n_train, int n_test, double noise,
              std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::poisson_distribution<int> count_dist(1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Planted data;
  data.theta_star = Eigen::VectorXd::Zero(n_features + 1);
  for (int i = 0; i < n_features; ++i) data.theta_star[i] = 0.05 * normal(engine);
  data.theta_star[n_features] = 1.5;  // bias keeps outputs near mid-range

  const int total = n_train + n_test;
  for (int p = 0; p < total; ++p) {
    DocumentVector d;
    for (int t = 0; t < n_features; ++t) {
      const int c = count_dist(engine);
      if (c > 0) d.add_term(t, c);
    }
    double s = data.theta_star[n_features];
    for (const auto& [t, c] : d.counts) s += data.theta_star[t] * c;
    s += noise * normal(engine);
    data.docs.push_back(d);
    TrainExample ex{{0, p}, s};
    if (p < n_train)
      data.train.push_back(ex);
    else
      data.test.push_back(ex);
  }
  return data;
}

}  // namespace

TEST_CASE("closed-form slope on two exact points") {
  // One feature, no bias: (x=1, s=2), (x=2, s=4) gives theta = 2 exactly.
  LrOptions opts;
  opts.regularization = 0.0;
  opts.include_bias = false;
  const std::vector<DocumentVector> docs{doc({{0, 1}}), doc({{0, 2}})};
  const std::vector<TrainExample> train{{{0, 0}, 2.0}, {{0, 1}, 4.0}};
  const auto model = fit_lr(train, docs, 1, 1, opts);
  CHECK(model.theta(0)[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(model.predict(0, docs[0]) == doctest::Approx(2.0));
  CHECK(model.predict(0, docs[1]) == doctest::Approx(3.0));  // 4 clipped to range hi
}

TEST_CASE("singular system with zero regularization reports the fix") {
  LrOptions opts;
  opts.regularization = 0.0;
  const std::vector<DocumentVector> docs{doc({{0, 1}, {1, 1}})};
  const std::vector<TrainExample> train{{{0, 0}, 1.0}};  // 1 row, 3 unknowns
  CHECK_THROWS_WITH_AS(fit_lr(train, docs, 1, 2, opts),
                       doctest::Contains("nonzero regularization"),
                       std::runtime_error);
}

TEST_CASE("reviewers without training rows fall back to the global mean") {
  LrOptions opts;
  const std::vector<DocumentVector> docs{doc({{0, 1}}), doc({{0, 2}})};
  const std::vector<TrainExample> train{{{0, 0}, 1.0}, {{0, 1}, 2.0}};
  const auto model = fit_lr(train, docs, 3, 1, opts);
  CHECK_FALSE(model.is_fallback(0));
  CHECK(model.is_fallback(1));
  CHECK(model.is_fallback(2));
  CHECK(model.fallback_value() == doctest::Approx(1.5));
  CHECK(model.predict(1, docs[0]) == doctest::Approx(1.5));
  CHECK(model.predict(2, docs[1]) == doctest::Approx(1.5));
}

TEST_CASE("constant model predicts its bias everywhere") {
  LrOptions opts;
  opts.regularization = 1e-9;
  const std::vector<DocumentVector> docs{doc({{0, 5}}), doc({{1, 2}}), doc({})};
  const std::vector<TrainExample> train{
      {{0, 0}, 1.5}, {{0, 1}, 1.5}, {{0, 2}, 1.5}};
  const auto model = fit_lr(train, docs, 1, 2, opts);
  for (int p = 0; p < 3; ++p) CHECK(model.predict(0, docs[p]) == doctest::Approx(1.5));
}

TEST_CASE("predictions stay inside the score range") {
  LrOptions opts;
  opts.regularization = 1e-6;
  const std::vector<DocumentVector> docs{doc({{0, 1}}), doc({{0, 100}})};
  const std::vector<TrainExample> train{{{0, 0}, 3.0}, {{0, 1}, 3.0}};
  const auto model = fit_lr(train, docs, 1, 1, opts);
  for (int p = 0; p < 2; ++p) {
    const double pred = model.predict(0, docs[p]);
    CHECK(pred >= 0.0);
    CHECK(pred <= 3.0);
  }
}

TEST_CASE("decoupling: removing one reviewer's rows changes only that row") {
  const auto corpus = generate_synthetic(4, 20, 3, 10, 77);
  std::vector<TrainExample> full, without_r0;
  for (const auto& [k, s] : corpus.scores.entries()) {
    full.push_back({k, s});
    if (k.reviewer != 0) without_r0.push_back({k, s});
  }
  LrOptions opts;
  const int v = static_cast<int>(corpus.vocabulary.size());
  const auto a = fit_lr(full, corpus.paper_docs, 4, v, opts);
  const auto b = fit_lr(without_r0, corpus.paper_docs, 4, v, opts);
  for (int r = 1; r < 4; ++r)
    for (int p = 0; p < corpus.n_papers(); ++p)
      CHECK(a.predict(r, corpus.paper_docs[p]) ==
            doctest::Approx(b.predict(r, corpus.paper_docs[p])).epsilon(1e-12));
}

TEST_CASE("exact recovery on noise-free planted data") {
  const auto data = plant(20, 120, 40, 0.0, 5);
  LrOptions opts;
  opts.regularization = 0.0;
  const auto model = fit_lr(data.train, data.docs, 1, 20, opts);
  CHECK((model.theta(0) - data.theta_star).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(lr_mse(model, data.test, data.docs) < 1e-10);
}

TEST_CASE("ridge shrinks the parameter norm monotonically") {
  const auto data = plant(10, 30, 0, 0.2, 6);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {1e-4, 1e-2, 1.0, 100.0}) {
    LrOptions opts;
    opts.regularization = eps;
    const auto model = fit_lr(data.train, data.docs, 1, 10, opts);
    const double norm = model.theta(0).norm();
    CHECK(norm <= previous + 1e-12);
    previous = norm;
  }
}

TEST_CASE("transformed training fits g-space labels") {
  TransformSpec sigmoid{TransformSpec::Kind::sigmoid, 4.5, 1.5};
  SUBCASE("top label trains toward g(3) ~ 1") {
    CHECK(sigmoid.apply(3.0) == doctest::Approx(1.0).epsilon(0.005));
    LrOptions opts;
    opts.regularization = 1e-9;
    opts.transform = sigmoid;
    const std::vector<DocumentVector> docs{doc({{0, 1}})};
    const std::vector<TrainExample> train{{{0, 0}, 3.0}};
    const auto model = fit_lr(train, docs, 1, 1, opts);
    CHECK(model.predict(0, docs[0]) == doctest::Approx(sigmoid.apply(3.0)).epsilon(1e-6));
  }
  SUBCASE("perfect linear structure in g-space reaches ~zero g-space mse") {
    // Labels constructed so g(s) is exactly linear in the features.
    std::mt19937_64 engine(9);
    std::uniform_int_distribution<int> count_dist(0, 3);
    std::vector<DocumentVector> docs;
    std::vector<TrainExample> train;
    const Eigen::Vector3d theta_g(0.07, -0.04, 0.5);  // g-space weights + bias
    for (int p = 0; p < 40; ++p) {
      DocumentVector d;
      for (int t = 0; t < 2; ++t) {
        const int c = count_dist(engine);
        if (c > 0) d.add_term(t, c);
      }
      double g_value = theta_g[2];
      for (const auto& [t, c] : d.counts) g_value += theta_g[t] * c;
      // invert the sigmoid to get the raw label the fit will re-transform
      const double s = 1.5 + std::log(g_value / (1.0 - g_value)) / 4.5;
      docs.push_back(d);
      train.push_back({{0, p}, s});
    }
    LrOptions opts;
    opts.regularization = 0.0;
    opts.transform = TransformSpec{TransformSpec::Kind::sigmoid, 4.5, 1.5};
    opts.score_range = {-10.0, 10.0};  // labels may leave [0,3] after inversion
    const auto model = fit_lr(train, docs, 1, 2, opts);
    CHECK(lr_mse(model, train, docs) < 1e-10);
  }
}

TEST_CASE("mse matches hand arithmetic") {
  LrOptions opts;
  const std::vector<DocumentVector> docs{doc({{0, 1}}), doc({{0, 2}})};
  // Constant-1 model via fallback: no training rows for reviewer 0.
  const auto model = fit_lr({{{0, 0}, 1.0}}, docs, 1, 1, opts);
  // errors 1 and 3 against labels 2 and 4... construct directly instead:
  // predict values then compare. Model fitted on one point predicts ~1 with
  // ridge; use explicit eval pairs whose errors we compute from the model.
  const double p0 = model.predict(0, docs[0]);
  const double p1 = model.predict(0, docs[1]);
  const std::vector<TrainExample> eval{{{0, 0}, p0 - 1.0}, {{0, 1}, p1 - 3.0}};
  CHECK(lr_mse(model, eval, docs) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(lr_mse(model, {}, docs), std::invalid_argument);
}

TEST_CASE("perfect predictions give zero mse") {
  const auto data = plant(5, 30, 10, 0.0, 12);
  LrOptions opts;
  opts.regularization = 0.0;
  const auto model = fit_lr(data.train, data.docs, 1, 5, opts);
  CHECK(lr_mse(model, data.train, data.docs) < 1e-18);
}
