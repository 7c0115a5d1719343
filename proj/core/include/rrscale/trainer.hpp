#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rrscale/batching.hpp"
#include "rrscale/scorer.hpp"

namespace rrscale {

struct Schedule {
  int n_steps = 2000;
  int n_checkpoints = 20;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
  /// Evenly spaced checkpoint steps ending at n_steps: i * n_steps / n_checkpoints, i = 1..n.
  std::vector<int> checkpoint_steps() const;
};

struct Checkpoint {
  int step = 0;
  std::int64_t examples_consumed = 0;
  double train_loss = 0.0;  // mean batch loss over the steps since the previous checkpoint
  Scorer scorer;
};

/// Adam with bias correction over every scorer parameter.
class AdamOptimizer {
 public:
  AdamOptimizer(const Scorer& scorer, const Schedule& schedule);
  void step(Scorer& scorer, const ScorerGradients& grads);

 private:
  Schedule schedule_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_weight_, v_weight_, m_bias_, v_bias_;
};

/// Mean loss of one batch and the matching d(loss)/d(score) for each scored column.
struct BatchObjective {
  FeatureBatch features;
  double loss = 0.0;
  std::vector<double> dscores;
};

/// Scores a batch and evaluates the objective's mean loss over its instances.
BatchObjective evaluate_batch(const Scorer& scorer, const Batch& batch, const RankingData& data,
                              ForwardCache& cache);

using CheckpointCallback = std::function<void(const Checkpoint&)>;

/// Trains a freshly initialized scorer for `schedule.n_steps` Adam steps and snapshots it at
/// the checkpoint steps. A non-finite batch loss aborts with TrainingError naming the step.
/// When `on_checkpoint` is set it is invoked for each snapshot as it is taken.
std::vector<Checkpoint> train_run(Objective objective, const ScorerConfig& config,
                                  const RankingData& data, const Schedule& schedule,
                                  const BatchConfig& batch_config, std::uint64_t data_seed,
                                  const CheckpointCallback& on_checkpoint = {});

}  // namespace rrscale
