#pragma once

#include <string>
#include <vector>

namespace rrscale {

/// A synthetic passage: bag of term ids plus its unit-norm latent topic vector.
struct SynthDoc {
  std::string doc_id;
  std::vector<int> tokens;
  std::vector<double> latent;

  bool operator==(const SynthDoc&) const = default;
};

struct SynthQuery {
  std::string query_id;
  std::vector<int> tokens;
  std::vector<double> latent;

  bool operator==(const SynthQuery&) const = default;
};

}  // namespace rrscale
