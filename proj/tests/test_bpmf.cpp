#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "papermatch/bpmf.hpp"
#include "papermatch/rng.hpp"

using namespace papermatch;

namespace {

// Planted low-rank data with a fraction of the entries observed.
struct PlantedMatrix {
  Eigen::MatrixXd truth;
  std::vector<TrainExample> observed;
  std::vector<TrainExample> held_out;
};

PlantedMatrix plant_low_rank(int n, int m, int rank, double noise,
                             double observed_fraction, std::uint64_t seed,
                             ScoreRange range = {0.0, 3.0}) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(rank, n), b(rank, m);
  for (int i = 0; i < rank; ++i) {
    for (int r = 0; r < n; ++r) a(i, r) = normal(engine);
    for (int p = 0; p < m; ++p) b(i, p) = normal(engine);
  }
  PlantedMatrix data;
  Eigen::MatrixXd raw = a.transpose() * b;
  // Affine-map into the interior of the score range.
  const double lo = raw.minCoeff(), hi = raw.maxCoeff();
  data.truth = ((raw.array() - lo) / (hi - lo) * (range.hi - range.lo) + range.lo);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      const double value = data.truth(r, p) + noise * normal(engine);
      TrainExample ex{{r, p}, value};
      if (unit(engine) < observed_fraction)
        data.observed.push_back(ex);
      else
        data.held_out.push_back(ex);
    }
  return data;
}

double test_rmse(const BpmfModel& model, const std::vector<TrainExample>& held_out) {
  double sum = 0.0;
  for (const auto& ex : held_out) {
    const double err = model.predict(ex.key.reviewer, ex.key.paper) - ex.score;
    sum += err * err;
  }
  return std::sqrt(sum / static_cast<double>(held_out.size()));
}

}  // namespace

TEST_CASE("map fit reconstructs a fully observed rank-1 matrix") {
  // s_rp = a_r * b_p, all entries observed, K = 1, weak priors.
  std::mt19937_64 engine(4);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  const int n = 8, m = 12;
  Eigen::VectorXd a(n), b(m);
  for (int r = 0; r < n; ++r) a[r] = unit(engine);
  for (int p = 0; p < m; ++p) b[p] = unit(engine);

  std::vector<TrainExample> train;
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) train.push_back({{r, p}, a[r] * b[p]});

  BpmfOptions opts;
  opts.K = 1;
  opts.sigma2 = 1e-6;  // sigma2/sigmaU2 ~ 0: weak prior
  opts.sigmaU2 = 1.0;
  opts.sigmaV2 = 1.0;
  opts.score_range = {0.0, 3.0};
  const auto model = fit_bpmf_map(train, n, m, opts, 1);

  double mse = 0.0;
  for (const auto& ex : train) {
    const double err = model.U().col(ex.key.reviewer).dot(model.V().col(ex.key.paper)) -
                       ex.score;
    mse += err * err;
  }
  mse /= static_cast<double>(train.size());
  CHECK(mse <= 1e-6);
}

TEST_CASE("map objective never increases across sweeps") {
  const auto data = plant_low_rank(15, 20, 3, 0.2, 0.6, 7);
  BpmfOptions opts;
  opts.K = 3;
  const auto model = fit_bpmf_map(data.observed, 15, 20, opts, 2);
  const auto& trace = model.map_objective_trace();
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("map with no observations shrinks to zero") {
  BpmfOptions opts;
  opts.K = 4;
  const auto model = fit_bpmf_map({}, 5, 6, opts, 3);
  CHECK(model.U().norm() == 0.0);
  CHECK(model.V().norm() == 0.0);
  for (int r = 0; r < 5; ++r)
    for (int p = 0; p < 6; ++p) CHECK(model.predict(r, p) == 0.0);
}

TEST_CASE("predictions clip into the score range") {
  SUBCASE("dot product inside the range passes through") {
    Eigen::MatrixXd u(2, 1), v(2, 1);
    u.col(0) << 1.0, 0.0;
    v.col(0) << 2.0, 5.0;
    BpmfModel model(u, v, BpmfOptions{}, {}, {});
    CHECK(model.predict(0, 0) == 2.0);
  }
  SUBCASE("out-of-range raw values are clipped") {
    Eigen::MatrixXd u(1, 1), v(1, 1);
    u(0, 0) = 7.0;
    v(0, 0) = 1.0;
    BpmfModel model(u, v, BpmfOptions{}, {}, {});
    CHECK(model.predict(0, 0) == 3.0);
  }
  SUBCASE("bayes prediction averages clipped per-sample values") {
    Eigen::MatrixXd u1(1, 1), v1(1, 1), u2(1, 1), v2(1, 1);
    u1(0, 0) = 1.0;
    v1(0, 0) = 1.0;  // clipped value 1
    u2(0, 0) = 2.0;
    v2(0, 0) = 1.0;  // clipped value 2
    BpmfModel model(u2, v2, BpmfOptions{}, {{u1, v1}, {u2, v2}}, {});
    CHECK(model.predict(0, 0) == doctest::Approx(1.5));
  }
}

TEST_CASE("gibbs sampler basics") {
  const auto data = plant_low_rank(12, 14, 2, 0.1, 0.5, 11);
  BpmfOptions opts;
  opts.K = 2;
  opts.n_samples = 40;
  opts.n_burnin = 10;

  SUBCASE("fixed seed reproduces the retained samples") {
    const auto a = fit_bpmf_bayes(data.observed, 12, 14, opts, 5);
    const auto b = fit_bpmf_bayes(data.observed, 12, 14, opts, 5);
    REQUIRE(a.samples().size() == 30);
    REQUIRE(b.samples().size() == 30);
    for (std::size_t t = 0; t < a.samples().size(); ++t) {
      CHECK(a.samples()[t].first == b.samples()[t].first);
      CHECK(a.samples()[t].second == b.samples()[t].second);
    }
  }
  SUBCASE("single retained sample defines the prediction") {
    BpmfOptions single = opts;
    single.n_samples = 6;
    single.n_burnin = 5;
    const auto model = fit_bpmf_bayes(data.observed, 12, 14, single, 8);
    REQUIRE(model.samples().size() == 1);
    const auto& [u, v] = model.samples().front();
    const ScoreRange range = single.score_range;
    for (int r = 0; r < 12; r += 3)
      for (int p = 0; p < 14; p += 4)
        CHECK(model.predict(r, p) ==
              doctest::Approx(range.clip(u.col(r).dot(v.col(p)))).epsilon(1e-15));
  }
  SUBCASE("sample-count bookkeeping") {
    CHECK_THROWS_AS(fit_bpmf_bayes(data.observed, 12, 14,
                                   [&] {
                                     BpmfOptions bad = opts;
                                     bad.n_burnin = bad.n_samples;
                                     return bad;
                                   }(),
                                   1),
                    std::invalid_argument);
  }
}

TEST_CASE("bayes beats the mean baseline on planted low-rank data") {
  const auto data = plant_low_rank(30, 30, 2, 0.1, 0.5, 21);
  BpmfOptions opts;
  opts.K = 2;
  opts.n_samples = 80;
  opts.n_burnin = 20;
  const auto model = fit_bpmf_bayes(data.observed, 30, 30, opts, 31);

  double mean = 0.0;
  for (const auto& ex : data.observed) mean += ex.score;
  mean /= static_cast<double>(data.observed.size());
  double baseline = 0.0;
  for (const auto& ex : data.held_out) {
    const double err = mean - ex.score;
    baseline += err * err;
  }
  baseline = std::sqrt(baseline / static_cast<double>(data.held_out.size()));

  CHECK(test_rmse(model, data.held_out) < baseline);
}

TEST_CASE("map fit is equivariant under reviewer relabeling") {
  const auto data = plant_low_rank(9, 11, 2, 0.15, 0.7, 13);
  const int n = 9, m = 11;
  BpmfOptions opts;
  opts.K = 2;

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 engine(99);
  std::shuffle(perm.begin(), perm.end(), engine);

  std::vector<TrainExample> relabeled;
  for (const auto& ex : data.observed)
    relabeled.push_back({{perm[ex.key.reviewer], ex.key.paper}, ex.score});

  // Same init, columns permuted to match the relabeling.
  RandomEngine init_engine(1234);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd u0(2, n), v0(2, m);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < 2; ++r) u0(r, c) = 0.1 * normal(init_engine);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < 2; ++r) v0(r, c) = 0.1 * normal(init_engine);
  Eigen::MatrixXd u0_perm(2, n);
  for (int r = 0; r < n; ++r) u0_perm.col(perm[r]) = u0.col(r);

  const auto base = fit_bpmf_map(data.observed, n, m, opts, 0, {{u0, v0}});
  const auto shuffled = fit_bpmf_map(relabeled, n, m, opts, 0, {{u0_perm, v0}});
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p)
      CHECK(base.predict(r, p) ==
            doctest::Approx(shuffled.predict(perm[r], p)).epsilon(1e-6));
}
