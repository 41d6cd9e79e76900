#include "orderpick/net.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orderpick {

Mlp::Mlp(Spec spec) : spec_(std::move(spec)) {
  if (spec_.input < 1 || spec_.heads.empty())
    throw std::invalid_argument("mlp: need input dim and at least one head");
  int offset = 0;
  int in = spec_.input;
  for (int width : spec_.hidden) {
    if (width < 1) throw std::invalid_argument("mlp: bad hidden width");
    trunk_.push_back({offset, offset + width * in, width, in});
    offset += width * in + width;
    in = width;
  }
  for (int dim : spec_.heads) {
    if (dim < 1) throw std::invalid_argument("mlp: bad head dim");
    heads_.push_back({offset, offset + dim * in, dim, in});
    offset += dim * in + dim;
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

void Mlp::init_orthogonal(Rng& rng, double hidden_gain, const std::vector<double>& head_gains) {
  if (head_gains.size() != heads_.size())
    throw std::invalid_argument("mlp: one init gain per head required");
  auto fill = [&](const Block& b, double gain) {
    Eigen::MatrixXd g(b.rows, b.cols);
    for (int c = 0; c < b.cols; ++c)
      for (int r = 0; r < b.rows; ++r) g(r, c) = rng.normal();
    // orthogonal factor of a Gaussian matrix, sign-fixed for determinism
    if (g.rows() < g.cols()) g = g.transpose().eval();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(
                            std::max(b.rows, b.cols), std::min(b.rows, b.cols));
    Eigen::VectorXd diag = qr.matrixQR().diagonal();
    for (int c = 0; c < q.cols(); ++c)
      if (diag(c) < 0) q.col(c) = -q.col(c);
    Eigen::MatrixXd w = (b.rows >= b.cols) ? q : Eigen::MatrixXd(q.transpose());
    Eigen::Map<Eigen::MatrixXd>(params_.data() + b.w_offset, b.rows, b.cols) = gain * w;
    Eigen::Map<Eigen::VectorXd>(params_.data() + b.b_offset, b.rows).setZero();
  };
  for (const Block& b : trunk_) fill(b, hidden_gain);
  for (size_t h = 0; h < heads_.size(); ++h) fill(heads_[h], head_gains[h]);
}

Mlp::Cache Mlp::forward(const Eigen::VectorXd& input) const {
  if (input.size() != spec_.input) throw std::invalid_argument("mlp: input size mismatch");
  Cache cache;
  cache.input = input;
  const Eigen::VectorXd* prev = &cache.input;
  cache.pre.reserve(trunk_.size());
  cache.act.reserve(trunk_.size());
  for (const Block& b : trunk_) {
    cache.pre.push_back(weight(b) * (*prev) + bias(b));
    cache.act.push_back(cache.pre.back().cwiseMax(0.0));
    prev = &cache.act.back();
  }
  cache.head.reserve(heads_.size());
  for (const Block& b : heads_) cache.head.push_back(weight(b) * (*prev) + bias(b));
  return cache;
}

void Mlp::backward(const Cache& cache, const std::vector<Eigen::VectorXd>& head_grads,
                   Eigen::VectorXd& grad) const {
  if (head_grads.size() != heads_.size())
    throw std::invalid_argument("mlp: head gradient count mismatch");
  if (grad.size() != params_.size()) throw std::invalid_argument("mlp: gradient buffer size");
  const Eigen::VectorXd& last =
      trunk_.empty() ? cache.input : cache.act.back();
  Eigen::VectorXd dlast = Eigen::VectorXd::Zero(last.size());
  for (size_t h = 0; h < heads_.size(); ++h) {
    if (head_grads[h].size() == 0) continue;
    const Block& b = heads_[h];
    if (head_grads[h].size() != b.rows) throw std::invalid_argument("mlp: head gradient dim");
    Eigen::Map<Eigen::MatrixXd>(grad.data() + b.w_offset, b.rows, b.cols).noalias() +=
        head_grads[h] * last.transpose();
    Eigen::Map<Eigen::VectorXd>(grad.data() + b.b_offset, b.rows) += head_grads[h];
    dlast.noalias() += weight(b).transpose() * head_grads[h];
  }
  for (int l = static_cast<int>(trunk_.size()) - 1; l >= 0; --l) {
    const Block& b = trunk_[l];
    Eigen::VectorXd dpre = dlast;
    for (int i = 0; i < dpre.size(); ++i)
      if (cache.pre[l][i] <= 0.0) dpre[i] = 0.0;
    const Eigen::VectorXd& below = l == 0 ? cache.input : cache.act[l - 1];
    Eigen::Map<Eigen::MatrixXd>(grad.data() + b.w_offset, b.rows, b.cols).noalias() +=
        dpre * below.transpose();
    Eigen::Map<Eigen::VectorXd>(grad.data() + b.b_offset, b.rows) += dpre;
    dlast.noalias() = weight(b).transpose() * dpre;
  }
}

MaskedCategorical MaskedCategorical::from_logits(const Eigen::VectorXd& logits,
                                                 const std::vector<uint8_t>& mask) {
  if (static_cast<size_t>(logits.size()) != mask.size())
    throw std::invalid_argument("masked categorical: mask size mismatch");
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double max_legal = neg_inf;
  for (int i = 0; i < logits.size(); ++i)
    if (mask[i]) max_legal = std::max(max_legal, logits[i]);
  if (max_legal == neg_inf)
    throw std::invalid_argument("masked categorical: all actions masked");

  MaskedCategorical dist;
  dist.probs = Eigen::VectorXd::Zero(logits.size());
  dist.logp = Eigen::VectorXd::Constant(logits.size(), neg_inf);
  double z = 0.0;
  for (int i = 0; i < logits.size(); ++i)
    if (mask[i]) z += std::exp(logits[i] - max_legal);
  const double log_z = std::log(z);
  for (int i = 0; i < logits.size(); ++i) {
    if (!mask[i]) continue;
    dist.logp[i] = logits[i] - max_legal - log_z;
    dist.probs[i] = std::exp(dist.logp[i]);
    dist.entropy -= dist.probs[i] * dist.logp[i];
  }
  return dist;
}

int MaskedCategorical::sample(Rng& rng) const {
  double r = rng.uniform();
  int last_legal = -1;
  for (int i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_legal = i;
    r -= probs[i];
    if (r < 0.0) return i;
  }
  return last_legal;  // numerical tail
}

int MaskedCategorical::argmax() const {
  int best = -1;
  double best_p = -1.0;
  for (int i = 0; i < probs.size(); ++i)
    if (probs[i] > best_p) {
      best_p = probs[i];
      best = i;
    }
  return best;
}

Eigen::VectorXd MaskedCategorical::grad_logits(int action, double advantage,
                                               double entropy_coef) const {
  if (action < 0 || action >= probs.size() || probs[action] <= 0.0)
    throw std::invalid_argument("masked categorical: gradient for illegal action");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(probs.size());
  for (int i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0 && logp[i] == -std::numeric_limits<double>::infinity()) continue;
    g[i] = advantage * (probs[i] - (i == action ? 1.0 : 0.0)) +
           entropy_coef * probs[i] * (logp[i] + entropy);
  }
  return g;
}

Adam::Adam(int num_params, double lr_, double beta1_, double beta2_, double eps_)
    : lr(lr_), beta1(beta1_), beta2(beta2_), eps(eps_),
      m(Eigen::VectorXd::Zero(num_params)), v(Eigen::VectorXd::Zero(num_params)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m.size() || grad.size() != m.size())
    throw std::invalid_argument("adam: size mismatch");
  t += 1;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -=
      lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

void clip_grad_norm(Eigen::VectorXd& grad, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / norm;
}

}  // namespace orderpick
