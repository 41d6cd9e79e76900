#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "orderpick/rng.hpp"

namespace orderpick {

// Fully-connected trunk with ReLU between hidden layers and any number of
// linear output heads. Parameters live in one flat vector so the optimizer,
// serialization, and finite-difference checks all see the same storage.
class Mlp {
public:
  struct Spec {
    int input = 0;
    std::vector<int> hidden;
    std::vector<int> heads;  // output dim per head

    bool operator==(const Spec&) const = default;
  };

  struct Cache {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> pre;   // hidden pre-activations
    std::vector<Eigen::VectorXd> act;   // hidden post-ReLU
    std::vector<Eigen::VectorXd> head;  // raw head outputs
  };

  Mlp() = default;  // empty net, unusable until assigned
  explicit Mlp(Spec spec);

  // orthogonal rows scaled by the given gains, biases zero
  void init_orthogonal(Rng& rng, double hidden_gain, const std::vector<double>& head_gains);

  Cache forward(const Eigen::VectorXd& input) const;

  // Accumulates dLoss/dparams into `grad` given dLoss/d(head output) for a
  // subset of heads (empty vector = head unused). Exact backpropagation.
  void backward(const Cache& cache, const std::vector<Eigen::VectorXd>& head_grads,
                Eigen::VectorXd& grad) const;

  const Spec& spec() const { return spec_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

private:
  struct Block {
    int w_offset = 0;
    int b_offset = 0;
    int rows = 0;
    int cols = 0;
  };

  Eigen::Map<const Eigen::MatrixXd> weight(const Block& b) const {
    return {params_.data() + b.w_offset, b.rows, b.cols};
  }
  Eigen::Map<const Eigen::VectorXd> bias(const Block& b) const {
    return {params_.data() + b.b_offset, b.rows};
  }

  Spec spec_;
  std::vector<Block> trunk_;
  std::vector<Block> heads_;
  Eigen::VectorXd params_;
};

// Categorical distribution over a masked discrete action space. Probabilities
// of masked entries are exactly zero; sampling and gradients never touch them.
struct MaskedCategorical {
  Eigen::VectorXd probs;
  Eigen::VectorXd logp;  // -inf on masked entries
  double entropy = 0.0;

  static MaskedCategorical from_logits(const Eigen::VectorXd& logits,
                                       const std::vector<uint8_t>& mask);

  int sample(Rng& rng) const;
  int argmax() const;

  // dL/dlogits for L = -advantage * logp[action] - entropy_coef * entropy
  Eigen::VectorXd grad_logits(int action, double advantage, double entropy_coef) const;
};

// adaptive moment estimation with bias correction
class Adam {
public:
  Adam(int num_params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  double lr = 3e-4;
  double beta1, beta2, eps;
  long t = 0;
  Eigen::VectorXd m, v;
};

// scales grad in place so its L2 norm is at most max_norm (no-op if <= 0)
void clip_grad_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace orderpick
