#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "papermatch/bpmf.hpp"
#include "papermatch/cli.hpp"
#include "papermatch/corpus.hpp"
#include "papermatch/corpus_io.hpp"
#include "papermatch/evaluator.hpp"
#include "papermatch/lm.hpp"
#include "papermatch/lr.hpp"
#include "papermatch/matcher.hpp"

namespace py = pybind11;
using namespace papermatch;

namespace {

using PyKey = std::pair<int, int>;

std::vector<Key> to_keys(const std::vector<PyKey>& pairs) {
  std::vector<Key> out;
  out.reserve(pairs.size());
  for (const auto& [r, p] : pairs) out.push_back({r, p});
  return out;
}

std::vector<PyKey> from_keys(const std::vector<Key>& keys) {
  std::vector<PyKey> out;
  out.reserve(keys.size());
  for (const Key& k : keys) out.emplace_back(k.reviewer, k.paper);
  return out;
}

Estimates to_estimates(const std::map<PyKey, double>& in) {
  Estimates out;
  for (const auto& [k, v] : in) out.emplace(Key{k.first, k.second}, v);
  return out;
}

std::map<PyKey, double> from_estimates(const Estimates& in) {
  std::map<PyKey, double> out;
  for (const auto& [k, v] : in) out.emplace(PyKey{k.reviewer, k.paper}, v);
  return out;
}

std::vector<TrainExample> to_examples(
    const std::vector<std::tuple<int, int, double>>& rows) {
  std::vector<TrainExample> out;
  out.reserve(rows.size());
  for (const auto& [r, p, s] : rows) out.push_back({{r, p}, s});
  return out;
}

DocumentVector to_doc(const std::map<int, long long>& counts) {
  DocumentVector doc;
  for (const auto& [term, count] : counts) doc.add_term(term, count);
  return doc;
}

MatchProblem make_problem(const Eigen::MatrixXd& suitability, int r_target, int p_min,
                          int p_max, double lambda, const std::string& penalty,
                          const std::optional<TransformSpec>& transform,
                          const std::vector<PyKey>& coi) {
  MatchProblem problem;
  problem.suitability = suitability;
  problem.r_target = r_target;
  problem.p_min = p_min;
  problem.p_max = p_max;
  problem.lambda = lambda;
  problem.penalty_shape = penalty == "square" ? PenaltyShape::square : PenaltyShape::abs;
  problem.transform = transform;
  problem.coi = to_keys(coi);
  std::sort(problem.coi.begin(), problem.coi.end());
  return problem;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Suitability prediction and optimal paper-to-reviewer matching";

  py::class_<ScoreRange>(m, "ScoreRange")
      .def(py::init<double, double>(), py::arg("lo") = 0.0, py::arg("hi") = 3.0)
      .def_readonly("lo", &ScoreRange::lo)
      .def_readonly("hi", &ScoreRange::hi);

  py::class_<TransformSpec>(m, "TransformSpec")
      .def(py::init([](const std::string& kind, double beta, double midpoint) {
             TransformSpec spec;
             spec.kind = kind == "sigmoid" ? TransformSpec::Kind::sigmoid
                                           : TransformSpec::Kind::identity;
             spec.beta = beta;
             spec.midpoint = midpoint;
             return spec;
           }),
           py::arg("kind") = "sigmoid", py::arg("beta") = 4.5,
           py::arg("midpoint") = 1.5)
      .def("apply", &TransformSpec::apply);

  py::class_<DatasetSplit>(m, "DatasetSplit")
      .def_property_readonly("train",
                             [](const DatasetSplit& s) { return from_keys(s.train); })
      .def_property_readonly(
          "validation", [](const DatasetSplit& s) { return from_keys(s.validation); })
      .def_property_readonly("test",
                             [](const DatasetSplit& s) { return from_keys(s.test); })
      .def_readonly("split_id", &DatasetSplit::split_id);

  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("n_reviewers", &Corpus::n_reviewers)
      .def_property_readonly("n_papers", &Corpus::n_papers)
      .def_property_readonly("observed",
                             [](const Corpus& c) {
                               std::map<PyKey, double> out;
                               for (const auto& [k, s] : c.scores.entries())
                                 out.emplace(PyKey{k.reviewer, k.paper}, s);
                               return out;
                             })
      .def_property_readonly("ground_truth",
                             [](const Corpus& c) -> py::object {
                               if (!c.ground_truth) return py::none();
                               const auto& truth = *c.ground_truth;
                               Eigen::MatrixXd out(truth.n_reviewers(), truth.n_papers());
                               for (const auto& [k, s] : truth.entries())
                                 out(k.reviewer, k.paper) = s;
                               return py::cast(out);
                             })
      .def_property_readonly("coi",
                             [](const Corpus& c) { return from_keys(c.coi); })
      .def_property_readonly("reviewer_ids",
                             [](const Corpus& c) { return c.reviewer_ids; })
      .def_property_readonly("paper_ids", [](const Corpus& c) { return c.paper_ids; })
      .def_property_readonly("vocabulary",
                             [](const Corpus& c) { return c.vocabulary.terms(); });

  m.def(
      "generate_synthetic",
      [](int n_reviewers, int n_papers, int n_topics, int obs_per_reviewer,
         std::uint64_t seed, int vocab_size, int archive_docs, int words_per_doc,
         int coi_per_reviewer) {
        SyntheticConfig config;
        config.n_reviewers = n_reviewers;
        config.n_papers = n_papers;
        config.n_topics = n_topics;
        config.obs_per_reviewer = obs_per_reviewer;
        config.seed = seed;
        config.vocab_size = vocab_size;
        config.archive_docs_per_reviewer = archive_docs;
        config.words_per_doc = words_per_doc;
        config.coi_per_reviewer = coi_per_reviewer;
        return generate_synthetic(config);
      },
      py::arg("n_reviewers"), py::arg("n_papers"), py::arg("n_topics") = 5,
      py::arg("obs_per_reviewer") = 10, py::arg("seed") = 0,
      py::arg("vocab_size") = 150, py::arg("archive_docs") = 3,
      py::arg("words_per_doc") = 80, py::arg("coi_per_reviewer") = 2);

  m.def(
      "make_splits",
      [](const Corpus& corpus, int n_splits, std::uint64_t seed) {
        return make_splits(corpus.scores, n_splits, seed);
      },
      py::arg("corpus"), py::arg("n_splits") = 5, py::arg("seed") = 0);
  m.def("subsample_train", &subsample_train, py::arg("split"),
        py::arg("k_per_reviewer"), py::arg("seed") = 0);

  py::class_<LmModel>(m, "LmModel")
      .def("word_prob", &LmModel::word_prob)
      .def("predict", [](const LmModel& model, int reviewer,
                         const std::map<int, long long>& paper_counts) {
        return model.predict(reviewer, to_doc(paper_counts));
      });
  m.def(
      "build_lm_model",
      [](const Corpus& corpus, double mu,
         const std::optional<std::vector<PyKey>>& augment_from) {
        if (!augment_from) return build_lm_model(corpus, mu);
        const auto keys = to_keys(*augment_from);
        return build_lm_model(corpus, mu, &keys);
      },
      py::arg("corpus"), py::arg("mu") = 1000.0, py::arg("augment_from") = py::none());
  m.def("lm_estimates", &lm_estimates);

  py::class_<Assignment>(m, "Assignment")
      .def_property_readonly("pairs",
                             [](const Assignment& a) { return from_keys(a.pairs); })
      .def_readonly("objective_value", &Assignment::objective_value)
      .def_readonly("raw_suitability_sum", &Assignment::raw_suitability_sum)
      .def_readonly("per_reviewer_load", &Assignment::per_reviewer_load);

  m.def(
      "apply_transform",
      [](const TransformSpec& spec, const Eigen::MatrixXd& s) {
        return apply_transform(spec, s);
      },
      py::arg("spec"), py::arg("suitability"));

  const auto solve_py = [](const Eigen::MatrixXd& suitability, int r_target, int p_min,
                           int p_max, double lambda, const std::string& penalty,
                           const std::optional<TransformSpec>& transform,
                           const std::vector<PyKey>& coi) {
    return solve_balance(make_problem(suitability, r_target, p_min, p_max, lambda,
                                      penalty, transform, coi));
  };
  m.def("solve_basic",
        [solve_py](const Eigen::MatrixXd& suitability, int r_target, int p_min,
                   int p_max, const std::optional<TransformSpec>& transform,
                   const std::vector<PyKey>& coi) {
          return solve_py(suitability, r_target, p_min, p_max, 0.0, "abs", transform,
                          coi);
        },
        py::arg("suitability"), py::arg("r_target") = 1, py::arg("p_min") = 0,
        py::arg("p_max") = std::numeric_limits<int>::max() / 4,
        py::arg("transform") = py::none(), py::arg("coi") = std::vector<PyKey>{});
  m.def("solve_balance", solve_py, py::arg("suitability"), py::arg("r_target") = 1,
        py::arg("p_min") = 0, py::arg("p_max") = std::numeric_limits<int>::max() / 4,
        py::arg("lambda_") = 0.0, py::arg("penalty") = "abs",
        py::arg("transform") = py::none(), py::arg("coi") = std::vector<PyKey>{});
  m.def(
      "verify",
      [](const Assignment& assignment, const Eigen::MatrixXd& suitability,
         int r_target, int p_min, int p_max, double lambda, const std::string& penalty,
         const std::optional<TransformSpec>& transform, const std::vector<PyKey>& coi) {
        const auto result =
            verify(assignment, make_problem(suitability, r_target, p_min, p_max,
                                            lambda, penalty, transform, coi));
        return py::make_tuple(result.ok, result.violations);
      },
      py::arg("assignment"), py::arg("suitability"), py::arg("r_target") = 1,
      py::arg("p_min") = 0, py::arg("p_max") = std::numeric_limits<int>::max() / 4,
      py::arg("lambda_") = 0.0, py::arg("penalty") = "abs",
      py::arg("transform") = py::none(), py::arg("coi") = std::vector<PyKey>{});

  py::class_<LrModel>(m, "LrModel")
      .def("predict", [](const LrModel& model, int reviewer,
                         const std::map<int, long long>& paper_counts) {
        return model.predict(reviewer, to_doc(paper_counts));
      });
  m.def(
      "fit_lr",
      [](const std::vector<std::tuple<int, int, double>>& train, const Corpus& corpus,
         double regularization, const std::optional<TransformSpec>& transform) {
        LrOptions opts;
        opts.regularization = regularization;
        opts.transform = transform;
        opts.score_range = corpus.scores.range();
        return fit_lr(to_examples(train), corpus.paper_docs, corpus.n_reviewers(),
                      static_cast<int>(corpus.vocabulary.size()), opts);
      },
      py::arg("train"), py::arg("corpus"), py::arg("regularization") = 1.0,
      py::arg("transform") = py::none());
  m.def("lr_predict_paper",
        [](const LrModel& model, const Corpus& corpus, int reviewer, int paper) {
          return model.predict(reviewer, corpus.paper_docs.at(paper));
        });

  py::class_<BpmfModel>(m, "BpmfModel")
      .def("predict", &BpmfModel::predict)
      .def("estimates", &BpmfModel::estimates)
      .def_property_readonly("map_objective_trace", &BpmfModel::map_objective_trace);
  const auto bpmf_opts = [](int latent_dim, int n_samples, int n_burnin,
                            double sigma2) {
    BpmfOptions opts;
    opts.K = latent_dim;
    opts.n_samples = n_samples;
    opts.n_burnin = n_burnin;
    opts.sigma2 = sigma2;
    return opts;
  };
  m.def(
      "fit_bpmf_map",
      [bpmf_opts](const std::vector<std::tuple<int, int, double>>& train,
                  int n_reviewers, int n_papers, int latent_dim, double sigma2,
                  std::uint64_t seed) {
        return fit_bpmf_map(to_examples(train), n_reviewers, n_papers,
                            bpmf_opts(latent_dim, 330, 30, sigma2), seed);
      },
      py::arg("train"), py::arg("n_reviewers"), py::arg("n_papers"),
      py::arg("latent_dim") = 10, py::arg("sigma2") = 0.5, py::arg("seed") = 0);
  m.def(
      "fit_bpmf_bayes",
      [bpmf_opts](const std::vector<std::tuple<int, int, double>>& train,
                  int n_reviewers, int n_papers, int latent_dim, int n_samples,
                  int n_burnin, double sigma2, std::uint64_t seed) {
        return fit_bpmf_bayes(to_examples(train), n_reviewers, n_papers,
                              bpmf_opts(latent_dim, n_samples, n_burnin, sigma2),
                              seed);
      },
      py::arg("train"), py::arg("n_reviewers"), py::arg("n_papers"),
      py::arg("latent_dim") = 10, py::arg("n_samples") = 330,
      py::arg("n_burnin") = 30, py::arg("sigma2") = 0.5, py::arg("seed") = 0);

  m.def(
      "rmse",
      [](const std::map<PyKey, double>& estimates, const Corpus& corpus,
         const std::vector<PyKey>& keys) {
        return rmse(to_estimates(estimates), corpus.scores, to_keys(keys));
      },
      py::arg("estimates"), py::arg("corpus"), py::arg("keys"));
  m.def(
      "evaluate_match",
      [](const Assignment& assignment, const Corpus& corpus,
         const std::vector<PyKey>& train_keys, const std::vector<PyKey>& test_keys,
         double tau, const std::optional<TransformSpec>& transform) {
        const auto train = restrict_scores(corpus.scores, to_keys(train_keys));
        const auto test = restrict_scores(corpus.scores, to_keys(test_keys));
        return evaluate_match(assignment, train, test, ImputationPolicy{tau},
                              transform);
      },
      py::arg("assignment"), py::arg("corpus"), py::arg("train_keys"),
      py::arg("test_keys"), py::arg("tau") = 1.0, py::arg("transform") = py::none());
  m.def("load_variance", &load_variance);

  m.def("run_cli", &run_cli, py::arg("args"),
        "Run a CLI invocation in-process; returns the exit code");
}
