#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "papermatch/corpus.hpp"
#include "papermatch/evaluator.hpp"
#include "oracles.hpp"

using namespace papermatch;

TEST_CASE("rmse") {
  ScoreMatrix truth(2, 2, {0.0, 3.0});
  truth.add({0, 0}, 1.0);
  truth.add({1, 1}, 2.0);

  SUBCASE("exact estimates give zero") {
    const Estimates est{{{0, 0}, 1.0}, {{1, 1}, 2.0}};
    CHECK(rmse(est, truth, {{0, 0}, {1, 1}}) == 0.0);
  }
  SUBCASE("hand arithmetic") {
    const Estimates est{{{0, 0}, 4.0}, {{1, 1}, 6.0}};  // errors 3 and 4
    CHECK(rmse(est, truth, {{0, 0}, {1, 1}}) ==
          doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-12));
  }
  SUBCASE("constant predictor at the mean scores the stddev") {
    const Estimates est{{{0, 0}, 1.5}, {{1, 1}, 1.5}};
    CHECK(rmse(est, truth, {{0, 0}, {1, 1}}) == doctest::Approx(0.5));
  }
  SUBCASE("empty keys rejected") {
    CHECK_THROWS_AS(rmse({}, truth, {}), std::invalid_argument);
  }
}

TEST_CASE("assemble_for_matching unions train, estimates and tau") {
  SUBCASE("all-missing gives the constant-tau matrix") {
    const ScoreMatrix train(2, 3, {0.0, 3.0});
    const auto matrix = assemble_for_matching(train, {}, {1.0});
    CHECK((matrix.array() == 1.0).all());
  }
  SUBCASE("fully observed train needs no imputation") {
    ScoreMatrix train(2, 2, {0.0, 3.0});
    for (int r = 0; r < 2; ++r)
      for (int p = 0; p < 2; ++p) train.add({r, p}, r + p);
    const auto matrix = assemble_for_matching(train, {}, {1.0});
    for (int r = 0; r < 2; ++r)
      for (int p = 0; p < 2; ++p) CHECK(matrix(r, p) == r + p);
  }
  SUBCASE("union rule, hand-assembled") {
    ScoreMatrix train(2, 2, {0.0, 3.0});
    train.add({0, 0}, 3.0);
    const Estimates est{{{1, 1}, 2.5}};
    const auto matrix = assemble_for_matching(train, est, {1.0});
    CHECK(matrix(0, 0) == 3.0);
    CHECK(matrix(0, 1) == 1.0);
    CHECK(matrix(1, 0) == 1.0);
    CHECK(matrix(1, 1) == 2.5);
  }
  SUBCASE("overlapping keys rejected") {
    ScoreMatrix train(1, 1, {0.0, 3.0});
    train.add({0, 0}, 2.0);
    CHECK_THROWS_AS(assemble_for_matching(train, {{{0, 0}, 1.0}}, {1.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("evaluate_match imputes with precedence train > test > tau") {
  Assignment assignment;
  assignment.pairs = {{0, 0}, {0, 1}, {1, 2}};
  assignment.per_reviewer_load = {2, 1};

  ScoreMatrix train(2, 3, {0.0, 3.0});
  train.add({0, 0}, 3.0);
  ScoreMatrix test(2, 3, {0.0, 3.0});
  test.add({0, 1}, 2.0);

  SUBCASE("mixed case sums 3 + 2 + tau") {
    CHECK(evaluate_match(assignment, train, test, {1.0}) == 6.0);
  }
  SUBCASE("all pairs train-observed uses only true scores") {
    ScoreMatrix full_train(2, 3, {0.0, 3.0});
    full_train.add({0, 0}, 1.0);
    full_train.add({0, 1}, 2.0);
    full_train.add({1, 2}, 3.0);
    const ScoreMatrix empty(2, 3, {0.0, 3.0});
    CHECK(evaluate_match(assignment, full_train, empty, {1.0}) == 6.0);
    // tau is irrelevant when nothing is missing
    CHECK(evaluate_match(assignment, full_train, empty, {0.25}) == 6.0);
  }
  SUBCASE("all pairs unobserved sums tau per pair") {
    const ScoreMatrix empty(2, 3, {0.0, 3.0});
    CHECK(evaluate_match(assignment, empty, empty, {1.0}) == 3.0);
  }
  SUBCASE("transform applies to the imputed value") {
    TransformSpec g{TransformSpec::Kind::sigmoid, 4.5, 1.5};
    const double expected = g.apply(3.0) + g.apply(2.0) + g.apply(1.0);
    CHECK(evaluate_match(assignment, train, test, {1.0}, g) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("baseline_estimates imputes tau on every test key") {
  const auto est = baseline_estimates({{0, 0}, {2, 5}}, {1.0});
  CHECK(est.size() == 2);
  for (const auto& [k, v] : est) CHECK(v == 1.0);
}

TEST_CASE("score_histogram bins assigned truth values") {
  ScoreMatrix truth(2, 3, {0.0, 3.0});
  truth.add({0, 0}, 3.0);
  truth.add({0, 1}, 3.0);
  truth.add({1, 2}, 0.0);
  Assignment assignment;
  assignment.pairs = {{0, 0}, {0, 1}, {1, 2}};
  assignment.per_reviewer_load = {2, 1};
  const auto bins = score_histogram(assignment, truth);
  CHECK(bins == std::vector<long long>{1, 0, 0, 2});

  SUBCASE("half-up rounding") {
    ScoreMatrix frac(1, 2, {0.0, 3.0});
    frac.add({0, 0}, 1.5);
    frac.add({0, 1}, 2.49);
    Assignment a;
    a.pairs = {{0, 0}, {0, 1}};
    a.per_reviewer_load = {2};
    CHECK(score_histogram(a, frac) == std::vector<long long>{0, 0, 2, 0});
  }
}

TEST_CASE("load_variance") {
  SUBCASE("balanced loads give zero") {
    Assignment a;
    a.pairs = {{0, 0}, {1, 1}};
    a.per_reviewer_load = {1, 1};
    CHECK(load_variance(a) == 0.0);
  }
  SUBCASE("hand arithmetic: loads (4,0) around mean 2") {
    Assignment a;
    a.per_reviewer_load = {4, 0};
    for (int p = 0; p < 4; ++p) a.pairs.push_back({0, p});
    CHECK(load_variance(a) == doctest::Approx(4.0));
  }
}

TEST_CASE("restrict_scores keeps exactly the requested keys") {
  const auto corpus = generate_synthetic(4, 12, 2, 6, 3);
  const auto keys = corpus.scores.keys();
  const std::vector<Key> subset(keys.begin(), keys.begin() + 5);
  const auto restricted = restrict_scores(corpus.scores, subset);
  CHECK(restricted.size() == 5);
  for (const Key& k : subset) CHECK(restricted.at(k) == corpus.scores.at(k));
}

TEST_CASE("eq-9 consistency: exact estimates reproduce the solver objective") {
  // Complete truth: train covers some cells, "estimates" equal true test
  // scores, nothing missing. evaluate_match must equal the matcher objective
  // bit-for-bit.
  std::mt19937_64 engine(47);
  std::uniform_int_distribution<int> score(0, 3);
  const int n = 3, m = 6;
  ScoreMatrix train(n, m, {0.0, 3.0});
  ScoreMatrix test(n, m, {0.0, 3.0});
  Estimates exact_estimates;
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      const double s = score(engine);
      if ((r + p) % 2 == 0) {
        train.add({r, p}, s);
      } else {
        test.add({r, p}, s);
        exact_estimates.emplace(Key{r, p}, s);
      }
    }

  MatchProblem problem;
  problem.suitability = assemble_for_matching(train, exact_estimates, {1.0});
  problem.r_target = 1;
  problem.p_min = 0;
  problem.p_max = m;
  const auto assignment = solve_basic(problem);
  CHECK(evaluate_match(assignment, train, test, {1.0}) == assignment.objective_value);
}

TEST_CASE("run_lambda_sweep records the trade-off") {
  std::mt19937_64 engine(99);
  std::uniform_real_distribution<double> score(0.0, 3.0);
  Eigen::MatrixXd s(5, 20);
  for (int r = 0; r < 5; ++r)
    for (int p = 0; p < 20; ++p) s(r, p) = score(engine);

  MatcherConfig matcher;
  matcher.p_min = 0;
  matcher.p_max = 20;
  const std::vector<double> grid{0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
  const auto report = run_lambda_sweep(s, grid, matcher);
  REQUIRE(report.lambda_cells.size() == grid.size());

  // lambda = 0 equals solve_basic
  MatchProblem basic;
  basic.suitability = s;
  basic.p_min = 0;
  basic.p_max = 20;
  const auto base = solve_basic(basic);
  CHECK(report.lambda_cells[0].raw_objective == base.objective_value);

  for (std::size_t i = 1; i < report.lambda_cells.size(); ++i) {
    CHECK(report.lambda_cells[i].raw_objective <=
          report.lambda_cells[i - 1].raw_objective + 1e-9);
    CHECK(report.lambda_cells[i].variance <=
          report.lambda_cells[i - 1].variance + 1e-9);
  }
  CHECK_THROWS_AS(run_lambda_sweep(s, {1.0, 0.5}, matcher), std::invalid_argument);

  const auto csv = report.lambda_csv();
  CHECK(csv.find("lambda,raw_objective") == 0);
}

namespace {

CurveConfig small_curve_config(std::vector<Method> methods, std::vector<int> budgets,
                               std::uint64_t seed) {
  CurveConfig config;
  config.methods = std::move(methods);
  config.budgets = std::move(budgets);
  config.matcher.r_target = 1;
  config.matcher.p_min = 0;
  config.matcher.p_max = 1000;
  config.seed = seed;
  config.threads = 2;
  config.bpmf.n_samples = 30;  // keep the unit test quick
  config.bpmf.n_burnin = 10;
  config.bpmf.K = 4;
  return config;
}

}  // namespace

TEST_CASE("run_elicitation_curve shape contract and budget-zero behavior") {
  const auto corpus = generate_synthetic(6, 30, 3, 12, 5);
  const auto splits = make_splits(corpus.scores, 5, 77);
  auto config = small_curve_config(
      {Method::baseline, Method::lm, Method::lr, Method::bpmf_map}, {0, 4, 8}, 11);
  const auto report = run_elicitation_curve(corpus, splits, config);

  CHECK(report.cells.size() == 5 * 3 * 4);
  // every (split, budget, method) combination appears exactly once
  std::set<std::tuple<int, int, std::string>> seen;
  for (const auto& cell : report.cells)
    CHECK(seen.emplace(cell.split_id, cell.budget, method_name(cell.method)).second);

  for (const auto& cell : report.cells) {
    if (cell.method == Method::lm) {
      CHECK(std::isnan(cell.rmse));  // log-likelihood scale has no RMSE
    } else {
      CHECK(std::isfinite(cell.rmse));
    }
    CHECK(std::isfinite(cell.match_quality));
    REQUIRE(!cell.histogram.empty());  // synthetic corpora carry ground truth
    long long total = 0;
    for (long long b : cell.histogram) total += b;
    CHECK(total == corpus.n_papers());  // M * r_target
  }

  // at budget 0 the non-lm methods coincide with the baseline
  for (const auto& cell : report.cells) {
    if (cell.budget != 0 || cell.method == Method::lm) continue;
    for (const auto& base : report.cells) {
      if (base.split_id == cell.split_id && base.budget == 0 &&
          base.method == Method::baseline)
        CHECK(cell.match_quality == base.match_quality);
    }
  }

  // baseline match quality is nondecreasing in the budget per split
  for (const auto& split : splits) {
    double previous = -1.0;
    for (int budget : config.budgets) {
      for (const auto& cell : report.cells)
        if (cell.split_id == split.split_id && cell.budget == budget &&
            cell.method == Method::baseline) {
          CHECK(cell.match_quality >= previous - 1e-9);
          previous = cell.match_quality;
        }
    }
  }

  // determinism: same config, same report
  const auto report2 = run_elicitation_curve(corpus, splits, config);
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    CHECK(report.cells[i].match_quality == report2.cells[i].match_quality);
    const bool both_nan =
        std::isnan(report.cells[i].rmse) && std::isnan(report2.cells[i].rmse);
    CHECK((both_nan || report.cells[i].rmse == report2.cells[i].rmse));
  }

  // serialization is parseable and complete
  const auto parsed = nlohmann::json::parse(report.to_json());
  CHECK(parsed["cells"].size() == report.cells.size());
  const auto csv = report.curve_csv();
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == report.cells.size() + 1);
}

TEST_CASE("run_elicitation_curve with a transform reports transformed quality") {
  const auto corpus = generate_synthetic(5, 20, 3, 10, 9);
  const auto splits = make_splits(corpus.scores, 5, 13);
  auto config = small_curve_config({Method::lr, Method::lr_tfm}, {4}, 21);
  config.matcher.transform = TransformSpec{TransformSpec::Kind::sigmoid, 4.5, 1.5};
  const auto report = run_elicitation_curve(corpus, splits, config);
  for (const auto& cell : report.cells) {
    REQUIRE(cell.match_quality_tfm.has_value());
    CHECK(std::isfinite(*cell.match_quality_tfm));
    CHECK(*cell.match_quality_tfm <= corpus.n_papers() * 1.0 + 1e-9);  // g in (0,1)
  }
}

TEST_CASE("run_elicitation_curve validates its inputs") {
  const auto corpus = generate_synthetic(4, 12, 2, 6, 1);
  const auto splits = make_splits(corpus.scores, 3, 2);
  CurveConfig config = small_curve_config({}, {0}, 1);
  CHECK_THROWS_AS(run_elicitation_curve(corpus, splits, config),
                  std::invalid_argument);
  config = small_curve_config({Method::baseline}, {}, 1);
  CHECK_THROWS_AS(run_elicitation_curve(corpus, splits, config),
                  std::invalid_argument);
  config = small_curve_config({Method::baseline}, {8, 4}, 1);
  CHECK_THROWS_AS(run_elicitation_curve(corpus, splits, config),
                  std::invalid_argument);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::baseline, Method::lm, Method::lr, Method::lr_tfm,
                   Method::bpmf_map, Method::bpmf})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("nope"), std::invalid_argument);
}
