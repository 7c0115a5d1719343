#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rrscale/features.hpp"

namespace rrscale {

struct ScorerConfig {
  int width = 8;
  int depth = 1;  // hidden layers
  int feature_dim = 36;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const ScorerConfig&) const = default;
};

/// Exact number of scalar parameters:
///   F*w + w            first hidden layer
///   (depth-1)*(w*w + w) remaining hidden layers
///   w + 1              linear scalar head
std::int64_t param_count(const ScorerConfig& config);

/// Fully connected layer, weights row-major (out x in).
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

struct ForwardCache {
  // activations[0] is the input batch; activations[l + 1] the tanh output of hidden layer l.
  std::vector<std::vector<double>> activations;
  std::size_t n = 0;
};

struct ScorerGradients {
  std::vector<std::vector<double>> weight;
  std::vector<std::vector<double>> bias;
};

/// MLP reranker: `depth` tanh layers of `width` units and a linear scalar head.
///
/// Every output is accumulated in a fixed order that does not depend on batch size, so
/// scoring a document alone or inside a batch gives the same bits.
class Scorer {
 public:
  /// Seeded scaled-Gaussian initialization: weights ~ N(0, 1/fan_in), biases zero.
  explicit Scorer(const ScorerConfig& config);

  const ScorerConfig& config() const { return config_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t allocated_parameters() const;

  /// Throws ShapeError when the feature dimension does not match the config.
  double score(std::span<const double> features) const;
  std::vector<double> score_batch(const FeatureBatch& batch) const;

  std::vector<double> forward(const FeatureBatch& batch, ForwardCache& cache) const;
  /// Accumulates parameter gradients for d(loss)/d(score) into `grads` (resized and zeroed).
  void backward(const ForwardCache& cache, std::span<const double> dscores,
                ScorerGradients& grads) const;

  /// Text dump: header line, then per layer "# layer <i> weight <out> <in>" followed by one
  /// decimal per line, then "# layer <i> bias <out>" and its values.
  void save(const std::filesystem::path& path) const;
  static Scorer load(const std::filesystem::path& path);

  bool operator==(const Scorer&) const = default;

 private:
  void check_dim(int dim) const;

  ScorerConfig config_;
  std::vector<DenseLayer> layers_;
};

}  // namespace rrscale
