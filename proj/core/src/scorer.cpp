#include "rrscale/scorer.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rrscale/errors.hpp"
#include "rrscale/rng.hpp"

namespace rrscale {

namespace {

// out[o * n + s] = bias[o] + sum_k W[o][k] * in[k * n + s]
void affine(const DenseLayer& layer, const double* in, std::size_t n, double* out) {
  for (int o = 0; o < layer.out; ++o) {
    double* row_out = out + static_cast<std::size_t>(o) * n;
    const double b = layer.bias[static_cast<std::size_t>(o)];
    for (std::size_t s = 0; s < n; ++s) {
      row_out[s] = b;
    }
    const double* w = layer.weight.data() + static_cast<std::size_t>(o) * layer.in;
    for (int k = 0; k < layer.in; ++k) {
      const double wk = w[k];
      const double* row_in = in + static_cast<std::size_t>(k) * n;
      for (std::size_t s = 0; s < n; ++s) {
        row_out[s] += wk * row_in[s];
      }
    }
  }
}

}  // namespace

void ScorerConfig::validate() const {
  if (width < 1) throw ConfigError("width", "must be >= 1, got " + std::to_string(width));
  if (depth < 1) throw ConfigError("depth", "must be >= 1, got " + std::to_string(depth));
  if (feature_dim < 1) throw ConfigError("feature_dim", "must be >= 1");
}

std::int64_t param_count(const ScorerConfig& c) {
  const std::int64_t f = c.feature_dim;
  const std::int64_t w = c.width;
  return f * w + w + (c.depth - 1) * (w * w + w) + w + 1;
}

Scorer::Scorer(const ScorerConfig& config) : config_(config) {
  config.validate();
  Rng rng(derive_seed(config.seed, "scorer-init"));
  int in = config.feature_dim;
  for (int l = 0; l <= config.depth; ++l) {
    const int out = l == config.depth ? 1 : config.width;
    DenseLayer layer{in, out, std::vector<double>(static_cast<std::size_t>(in) * out),
                     std::vector<double>(static_cast<std::size_t>(out), 0.0)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& w : layer.weight) {
      w = scale * rng.normal();
    }
    layers_.push_back(std::move(layer));
    in = out;
  }
}

std::size_t Scorer::allocated_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    n += l.weight.size() + l.bias.size();
  }
  return n;
}

void Scorer::check_dim(int dim) const {
  if (dim != config_.feature_dim) {
    throw ShapeError(fmt::format("scorer expects {} features, got {}", config_.feature_dim, dim));
  }
}

double Scorer::score(std::span<const double> features) const {
  check_dim(static_cast<int>(features.size()));
  FeatureBatch batch(config_.feature_dim, 1);
  batch.set_column(0, features);
  return score_batch(batch).front();
}

std::vector<double> Scorer::score_batch(const FeatureBatch& batch) const {
  ForwardCache cache;
  return forward(batch, cache);
}

std::vector<double> Scorer::forward(const FeatureBatch& batch, ForwardCache& cache) const {
  check_dim(batch.dim);
  const std::size_t n = batch.n;
  cache.n = n;
  cache.activations.resize(layers_.size());
  cache.activations[0] = batch.data;
  std::vector<double> scores(n);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const double* in = cache.activations[l].data();
    if (l + 1 == layers_.size()) {
      affine(layer, in, n, scores.data());
    } else {
      auto& out = cache.activations[l + 1];
      out.resize(static_cast<std::size_t>(layer.out) * n);
      affine(layer, in, n, out.data());
      for (auto& v : out) {
        v = std::tanh(v);
      }
    }
  }
  return scores;
}

void Scorer::backward(const ForwardCache& cache, std::span<const double> dscores,
                      ScorerGradients& grads) const {
  const std::size_t n = cache.n;
  if (dscores.size() != n) {
    throw ShapeError(fmt::format("{} score gradients for a batch of {}", dscores.size(), n));
  }
  grads.weight.resize(layers_.size());
  grads.bias.resize(layers_.size());
  std::vector<double> delta(dscores.begin(), dscores.end());  // d loss / d pre-activation
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    const auto& input = cache.activations[li];
    auto& gw = grads.weight[li];
    auto& gb = grads.bias[li];
    gw.assign(layer.weight.size(), 0.0);
    gb.assign(layer.bias.size(), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* d = delta.data() + static_cast<std::size_t>(o) * n;
      double sb = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        sb += d[s];
      }
      gb[static_cast<std::size_t>(o)] = sb;
      double* gw_row = gw.data() + static_cast<std::size_t>(o) * layer.in;
      for (int k = 0; k < layer.in; ++k) {
        const double* a = input.data() + static_cast<std::size_t>(k) * n;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        std::size_t s = 0;
        for (; s + 4 <= n; s += 4) {
          s0 += d[s] * a[s];
          s1 += d[s + 1] * a[s + 1];
          s2 += d[s + 2] * a[s + 2];
          s3 += d[s + 3] * a[s + 3];
        }
        for (; s < n; ++s) {
          s0 += d[s] * a[s];
        }
        gw_row[k] = (s0 + s1) + (s2 + s3);
      }
    }
    if (li == 0) {
      break;
    }
    // Propagate through the weights, then through tanh of the previous layer.
    std::vector<double> prev(static_cast<std::size_t>(layer.in) * n, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* d = delta.data() + static_cast<std::size_t>(o) * n;
      const double* w = layer.weight.data() + static_cast<std::size_t>(o) * layer.in;
      for (int k = 0; k < layer.in; ++k) {
        const double wk = w[k];
        double* p = prev.data() + static_cast<std::size_t>(k) * n;
        for (std::size_t s = 0; s < n; ++s) {
          p[s] += wk * d[s];
        }
      }
    }
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const double h = input[i];
      prev[i] *= 1.0 - h * h;
    }
    delta = std::move(prev);
  }
}

void Scorer::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write checkpoint " + path.string());
  }
  out << fmt::format("# scorer width={} depth={} feature_dim={} seed={}\n", config_.width,
                     config_.depth, config_.feature_dim, config_.seed);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    out << fmt::format("# layer {} weight {} {}\n", l, layer.out, layer.in);
    for (double w : layer.weight) {
      out << fmt::format("{:.17g}\n", w);
    }
    out << fmt::format("# layer {} bias {}\n", l, layer.out);
    for (double b : layer.bias) {
      out << fmt::format("{:.17g}\n", b);
    }
  }
  if (!out) {
    throw DataError("failed writing checkpoint " + path.string());
  }
}

Scorer Scorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot read checkpoint " + path.string());
  }
  const std::string source = path.string();
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) {
    throw ParseError(source, line_no, "empty checkpoint");
  }
  ScorerConfig config;
  if (std::sscanf(line.c_str(), "# scorer width=%d depth=%d feature_dim=%d seed=%" SCNu64,
                  &config.width, &config.depth, &config.feature_dim, &config.seed) != 4) {
    throw ParseError(source, line_no, "bad checkpoint header");
  }
  Scorer scorer(config);
  auto read_block = [&](const std::string& expected_header, std::vector<double>& values) {
    ++line_no;
    if (!std::getline(in, line) || line != expected_header) {
      throw ParseError(source, line_no, "expected '" + expected_header + "'");
    }
    for (auto& v : values) {
      ++line_no;
      if (!std::getline(in, line)) {
        throw ParseError(source, line_no, "truncated checkpoint");
      }
      std::size_t used = 0;
      try {
        v = std::stod(line, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != line.size() || line.empty()) {
        throw ParseError(source, line_no, "bad decimal '" + line + "'");
      }
    }
  };
  for (std::size_t l = 0; l < scorer.layers_.size(); ++l) {
    auto& layer = scorer.layers_[l];
    read_block(fmt::format("# layer {} weight {} {}", l, layer.out, layer.in), layer.weight);
    read_block(fmt::format("# layer {} bias {}", l, layer.out), layer.bias);
  }
  return scorer;
}

}  // namespace rrscale
