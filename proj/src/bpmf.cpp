#include "papermatch/bpmf.hpp"

#include <cmath>
#include <stdexcept>

#include "papermatch/rng.hpp"

namespace papermatch {

BpmfModel::BpmfModel(Eigen::MatrixXd U, Eigen::MatrixXd V, BpmfOptions options,
                     std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> samples,
                     std::vector<double> map_objective_trace)
    : U_(std::move(U)),
      V_(std::move(V)),
      options_(std::move(options)),
      samples_(std::move(samples)),
      map_objective_trace_(std::move(map_objective_trace)) {}

double BpmfModel::predict(int reviewer, int paper) const {
  const ScoreRange range = options_.score_range;
  if (samples_.empty())
    return range.clip(U_.col(reviewer).dot(V_.col(paper)));
  double sum = 0.0;
  for (const auto& [u, v] : samples_)
    sum += range.clip(u.col(reviewer).dot(v.col(paper)));
  return sum / static_cast<double>(samples_.size());
}

Eigen::MatrixXd BpmfModel::estimates() const {
  const int n = static_cast<int>(U_.cols());
  const int m = static_cast<int>(V_.cols());
  const ScoreRange range = options_.score_range;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, m);
  if (samples_.empty()) {
    out = (U_.transpose() * V_).cwiseMax(range.lo).cwiseMin(range.hi);
    return out;
  }
  for (const auto& [u, v] : samples_)
    out += (u.transpose() * v).cwiseMax(range.lo).cwiseMin(range.hi);
  out /= static_cast<double>(samples_.size());
  return out;
}

namespace {

struct ObservedLists {
  std::vector<std::vector<std::pair<int, double>>> by_reviewer;  // (paper, score)
  std::vector<std::vector<std::pair<int, double>>> by_paper;     // (reviewer, score)
};

ObservedLists index_train(const std::vector<TrainExample>& train, int n, int m) {
  ObservedLists obs;
  obs.by_reviewer.resize(n);
  obs.by_paper.resize(m);
  for (const TrainExample& ex : train) {
    if (ex.key.reviewer < 0 || ex.key.reviewer >= n || ex.key.paper < 0 ||
        ex.key.paper >= m)
      throw std::out_of_range("bpmf: train key outside matrix");
    obs.by_reviewer[ex.key.reviewer].emplace_back(ex.key.paper, ex.score);
    obs.by_paper[ex.key.paper].emplace_back(ex.key.reviewer, ex.score);
  }
  return obs;
}

double map_objective(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                     const ObservedLists& obs, double ridge_u, double ridge_v) {
  double value = 0.0;
  for (int r = 0; r < static_cast<int>(obs.by_reviewer.size()); ++r)
    for (const auto& [p, s] : obs.by_reviewer[r]) {
      const double e = u.col(r).dot(v.col(p)) - s;
      value += e * e;
    }
  value += ridge_u * u.squaredNorm();
  value += ridge_v * v.squaredNorm();
  return value;
}

// Exact minimizer of the objective in one side's columns given the other.
void ridge_sweep(Eigen::MatrixXd& target, const Eigen::MatrixXd& fixed,
                 const std::vector<std::vector<std::pair<int, double>>>& obs,
                 double ridge) {
  const int k = static_cast<int>(target.rows());
  for (int c = 0; c < static_cast<int>(target.cols()); ++c) {
    Eigen::MatrixXd a = ridge * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (const auto& [other, s] : obs[c]) {
      a.noalias() += fixed.col(other) * fixed.col(other).transpose();
      b.noalias() += s * fixed.col(other);
    }
    target.col(c) = a.llt().solve(b);
  }
}

Eigen::MatrixXd gaussian_matrix(RandomEngine& engine, int rows, int cols,
                                double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) out(r, c) = scale * normal(engine);
  return out;
}

// Wishart(W, nu) via the Bartlett decomposition.
Eigen::MatrixXd sample_wishart(RandomEngine& engine, const Eigen::MatrixXd& w,
                               double nu) {
  const int k = static_cast<int>(w.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("bpmf: Wishart scale matrix not positive definite");
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < k; ++i) {
    std::chi_squared_distribution<double> chi2(nu - i);
    a(i, i) = std::sqrt(chi2(engine));
    for (int j = 0; j < i; ++j) a(i, j) = normal(engine);
  }
  Eigen::MatrixXd la = l * a;
  return la * la.transpose();
}

struct GaussianWishartDraw {
  Eigen::VectorXd mu;
  Eigen::MatrixXd lambda;  // precision
};

// Posterior draw of (mu, Lambda) given the columns of `factors`, with prior
// mu0 = 0, W0 = I, nu0 = K and the given beta0.
GaussianWishartDraw sample_hyper(RandomEngine& engine, const Eigen::MatrixXd& factors,
                                 double beta0) {
  const int k = static_cast<int>(factors.rows());
  const double n = static_cast<double>(factors.cols());
  const Eigen::VectorXd mean =
      n > 0 ? Eigen::VectorXd(factors.rowwise().mean()) : Eigen::VectorXd::Zero(k);

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(k, k);
  for (int c = 0; c < static_cast<int>(factors.cols()); ++c) {
    const Eigen::VectorXd d = factors.col(c) - mean;
    scatter.noalias() += d * d.transpose();
  }

  const double beta_star = beta0 + n;
  const double nu_star = static_cast<double>(k) + n;
  const Eigen::VectorXd mu_star = (n / beta_star) * mean;  // mu0 = 0
  Eigen::MatrixXd w_inv = Eigen::MatrixXd::Identity(k, k);  // W0 = I
  w_inv += scatter;
  w_inv.noalias() += (beta0 * n / beta_star) * mean * mean.transpose();
  Eigen::MatrixXd w_star = w_inv.llt().solve(Eigen::MatrixXd::Identity(k, k));
  // Symmetrize against accumulated round-off before the Cholesky inside.
  w_star = 0.5 * (w_star + w_star.transpose());

  GaussianWishartDraw draw;
  draw.lambda = sample_wishart(engine, w_star, nu_star);
  draw.lambda = 0.5 * (draw.lambda + draw.lambda.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(beta_star * draw.lambda);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("bpmf: hyperparameter precision not positive definite");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z[i] = normal(engine);
  // x = mu* + L^-T z has covariance (beta* Lambda)^-1.
  draw.mu = mu_star + llt.matrixL().transpose().solve(z);
  return draw;
}

// Conditional Gaussian draw of one factor column given the other side.
void sample_columns(RandomEngine& engine, Eigen::MatrixXd& target,
                    const Eigen::MatrixXd& fixed,
                    const std::vector<std::vector<std::pair<int, double>>>& obs,
                    const GaussianWishartDraw& hyper, double alpha) {
  const int k = static_cast<int>(target.rows());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int c = 0; c < static_cast<int>(target.cols()); ++c) {
    Eigen::MatrixXd precision = hyper.lambda;
    Eigen::VectorXd rhs = hyper.lambda * hyper.mu;
    for (const auto& [other, s] : obs[c]) {
      precision.noalias() += alpha * fixed.col(other) * fixed.col(other).transpose();
      rhs.noalias() += alpha * s * fixed.col(other);
    }
    precision = 0.5 * (precision + precision.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("bpmf: conditional precision not positive definite");
    const Eigen::VectorXd mean = llt.solve(rhs);
    Eigen::VectorXd z(k);
    for (int i = 0; i < k; ++i) z[i] = normal(engine);
    target.col(c) = mean + llt.matrixL().transpose().solve(z);
  }
}

}  // namespace

BpmfModel fit_bpmf_map(
    const std::vector<TrainExample>& train, int n_reviewers, int n_papers,
    const BpmfOptions& options, std::uint64_t seed,
    const std::optional<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& init) {
  if (options.K < 1) throw std::invalid_argument("bpmf: K must be >= 1");
  if (options.sigma2 <= 0.0 || options.sigmaU2 <= 0.0 || options.sigmaV2 <= 0.0)
    throw std::invalid_argument("bpmf: variances must be > 0");
  const auto obs = index_train(train, n_reviewers, n_papers);
  const double ridge_u = options.sigma2 / options.sigmaU2;
  const double ridge_v = options.sigma2 / options.sigmaV2;

  Eigen::MatrixXd u, v;
  if (init) {
    u = init->first;
    v = init->second;
    if (u.rows() != options.K || u.cols() != n_reviewers || v.rows() != options.K ||
        v.cols() != n_papers)
      throw std::invalid_argument("bpmf: init dimensions mismatch");
  } else {
    RandomEngine engine(derive_seed(seed, "bpmf/map-init"));
    u = gaussian_matrix(engine, options.K, n_reviewers, 0.1);
    v = gaussian_matrix(engine, options.K, n_papers, 0.1);
  }

  std::vector<double> trace;
  trace.push_back(map_objective(u, v, obs, ridge_u, ridge_v));
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    ridge_sweep(u, v, obs.by_reviewer, ridge_u);
    ridge_sweep(v, u, obs.by_paper, ridge_v);
    trace.push_back(map_objective(u, v, obs, ridge_u, ridge_v));
    const double decrease = trace[trace.size() - 2] - trace.back();
    if (decrease < options.tol) break;
  }
  return BpmfModel(std::move(u), std::move(v), options, {}, std::move(trace));
}

BpmfModel fit_bpmf_bayes(const std::vector<TrainExample>& train, int n_reviewers,
                         int n_papers, const BpmfOptions& options, std::uint64_t seed) {
  if (options.n_burnin < 0 || options.n_samples <= options.n_burnin)
    throw std::invalid_argument("bpmf: need n_samples > n_burnin >= 0");
  const auto obs = index_train(train, n_reviewers, n_papers);
  const double alpha = 1.0 / options.sigma2;

  BpmfModel map = fit_bpmf_map(train, n_reviewers, n_papers, options,
                               derive_seed(seed, "bpmf/map-for-bayes"));
  Eigen::MatrixXd u = map.U();
  Eigen::MatrixXd v = map.V();

  RandomEngine engine(derive_seed(seed, "bpmf/gibbs"));
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> samples;
  samples.reserve(options.n_samples - options.n_burnin);
  for (int t = 0; t < options.n_samples; ++t) {
    const GaussianWishartDraw hyper_u = sample_hyper(engine, u, options.beta0);
    const GaussianWishartDraw hyper_v = sample_hyper(engine, v, options.beta0);
    sample_columns(engine, u, v, obs.by_reviewer, hyper_u, alpha);
    sample_columns(engine, v, u, obs.by_paper, hyper_v, alpha);
    if (t >= options.n_burnin) samples.emplace_back(u, v);
  }
  return BpmfModel(std::move(u), std::move(v), options, std::move(samples),
                   map.map_objective_trace());
}

}  // namespace papermatch
