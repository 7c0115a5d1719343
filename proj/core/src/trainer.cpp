#include "rrscale/trainer.hpp"

#include <cmath>

#include "rrscale/errors.hpp"
#include "rrscale/losses.hpp"

namespace rrscale {

void Schedule::validate() const {
  if (n_steps < 1) throw ConfigError("n_steps", "must be >= 1");
  if (n_checkpoints < 1) throw ConfigError("n_checkpoints", "must be >= 1");
  if (n_checkpoints > n_steps) throw ConfigError("n_checkpoints", "cannot exceed n_steps");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate", "must be positive and finite");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1", "must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2", "must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
}

std::vector<int> Schedule::checkpoint_steps() const {
  std::vector<int> steps;
  steps.reserve(static_cast<std::size_t>(n_checkpoints));
  for (int i = 1; i <= n_checkpoints; ++i) {
    steps.push_back(static_cast<int>(static_cast<std::int64_t>(i) * n_steps / n_checkpoints));
  }
  return steps;
}

AdamOptimizer::AdamOptimizer(const Scorer& scorer, const Schedule& schedule)
    : schedule_(schedule) {
  for (const auto& layer : scorer.layers()) {
    m_weight_.emplace_back(layer.weight.size(), 0.0);
    v_weight_.emplace_back(layer.weight.size(), 0.0);
    m_bias_.emplace_back(layer.bias.size(), 0.0);
    v_bias_.emplace_back(layer.bias.size(), 0.0);
  }
}

void AdamOptimizer::step(Scorer& scorer, const ScorerGradients& grads) {
  ++t_;
  const double b1 = schedule_.beta1;
  const double b2 = schedule_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = schedule_.learning_rate;
  const double eps = schedule_.epsilon;
  auto update = [&](std::vector<double>& param, const std::vector<double>& g,
                    std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      param[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  };
  auto& layers = scorer.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, grads.weight[l], m_weight_[l], v_weight_[l]);
    update(layers[l].bias, grads.bias[l], m_bias_[l], v_bias_[l]);
  }
}

BatchObjective evaluate_batch(const Scorer& scorer, const Batch& batch, const RankingData& data,
                              ForwardCache& cache) {
  const int dim = data.feature_dim();
  std::vector<double> column(static_cast<std::size_t>(dim));
  BatchObjective out;

  switch (batch.objective) {
    case Objective::Pointwise: {
      const std::size_t n = batch.pointwise.size();
      out.features = FeatureBatch(dim, n);
      for (std::size_t s = 0; s < n; ++s) {
        data.features(batch.pointwise[s].query_id, batch.pointwise[s].doc_id, column);
        out.features.set_column(s, column);
      }
      const auto scores = scorer.forward(out.features, cache);
      out.dscores.resize(n);
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t s = 0; s < n; ++s) {
        const auto l = pointwise_loss(scores[s], batch.pointwise[s].label);
        out.loss += l.loss * inv;
        out.dscores[s] = l.grad * inv;
      }
      break;
    }
    case Objective::Pairwise: {
      // Column 2i scores the positive of pair i, column 2i+1 its negative.
      const std::size_t n = batch.pairwise.size();
      out.features = FeatureBatch(dim, 2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& p = batch.pairwise[i];
        data.features(p.query_id, p.positive, column);
        out.features.set_column(2 * i, column);
        data.features(p.query_id, p.negative, column);
        out.features.set_column(2 * i + 1, column);
      }
      const auto scores = scorer.forward(out.features, cache);
      out.dscores.assign(2 * n, 0.0);
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto l = pairwise_ranknet_loss(scores[2 * i], scores[2 * i + 1]);
        out.loss += l.loss * inv;
        out.dscores[2 * i] += l.grad_pos * inv;
        out.dscores[2 * i + 1] += l.grad_neg * inv;
      }
      break;
    }
    case Objective::Listwise: {
      std::size_t total = 0;
      for (const auto& list : batch.listwise) {
        total += list.docs.size();
      }
      out.features = FeatureBatch(dim, total);
      std::size_t s = 0;
      for (const auto& list : batch.listwise) {
        for (const auto& doc : list.docs) {
          data.features(list.query_id, doc, column);
          out.features.set_column(s++, column);
        }
      }
      const auto scores = scorer.forward(out.features, cache);
      out.dscores.assign(total, 0.0);
      const double inv = 1.0 / static_cast<double>(batch.listwise.size());
      std::size_t offset = 0;
      for (const auto& list : batch.listwise) {
        const std::span<const double> list_scores(scores.data() + offset, list.docs.size());
        const auto l = listwise_listnet_loss(list_scores, list.grades);
        out.loss += l.loss * inv;
        for (std::size_t j = 0; j < list.docs.size(); ++j) {
          out.dscores[offset + j] = l.grads[j] * inv;
        }
        offset += list.docs.size();
      }
      break;
    }
  }
  return out;
}

std::vector<Checkpoint> train_run(Objective objective, const ScorerConfig& config,
                                  const RankingData& data, const Schedule& schedule,
                                  const BatchConfig& batch_config, std::uint64_t data_seed,
                                  const CheckpointCallback& on_checkpoint) {
  schedule.validate();
  if (config.feature_dim != data.feature_dim()) {
    throw ShapeError("scorer feature_dim " + std::to_string(config.feature_dim) +
                     " does not match data feature_dim " + std::to_string(data.feature_dim()));
  }
  Scorer scorer(config);
  AdamOptimizer optimizer(scorer, schedule);
  BatchStream stream(objective, data, batch_config, data_seed);
  const auto steps = schedule.checkpoint_steps();
  const std::int64_t effective = batch_config.effective_batch_size(objective);

  std::vector<Checkpoint> checkpoints;
  checkpoints.reserve(steps.size());
  ForwardCache cache;
  ScorerGradients grads;
  double loss_sum = 0.0;
  int loss_count = 0;
  std::size_t next = 0;
  for (int step = 1; step <= schedule.n_steps; ++step) {
    const Batch batch = stream.next();
    const auto result = evaluate_batch(scorer, batch, data, cache);
    if (!std::isfinite(result.loss)) {
      throw TrainingError(step, "non-finite loss (" + std::to_string(result.loss) + ")");
    }
    scorer.backward(cache, result.dscores, grads);
    optimizer.step(scorer, grads);
    loss_sum += result.loss;
    ++loss_count;
    if (next < steps.size() && step == steps[next]) {
      checkpoints.push_back(
          {step, step * effective, loss_sum / static_cast<double>(loss_count), scorer});
      if (on_checkpoint) {
        on_checkpoint(checkpoints.back());
      }
      loss_sum = 0.0;
      loss_count = 0;
      ++next;
    }
  }
  return checkpoints;
}

}  // namespace rrscale
