#include "rrscale/ranked_run.hpp"

#include <algorithm>
#include <set>

#include "rrscale/errors.hpp"

namespace rrscale {

RankedRun make_ranked_run(std::string query_id,
                          std::vector<std::pair<std::string, double>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) {
      return x.second > y.second;
    }
    return x.first < y.first;
  });
  RankedRun run{std::move(query_id), {}};
  run.entries.reserve(scored.size());
  int rank = 1;
  for (auto& [doc, score] : scored) {
    run.entries.push_back({std::move(doc), score, rank++});
  }
  return run;
}

void validate_run(const RankedRun& run) {
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < run.entries.size(); ++i) {
    const auto& e = run.entries[i];
    if (e.rank != static_cast<int>(i) + 1) {
      throw ValidationError("run", 0,
                            "query " + run.query_id + ": rank " + std::to_string(e.rank) +
                                " where " + std::to_string(i + 1) + " expected");
    }
    if (i > 0 && e.score > run.entries[i - 1].score) {
      throw ValidationError("run", 0,
                            "query " + run.query_id + ": score increases at rank " +
                                std::to_string(e.rank));
    }
    if (!seen.insert(e.doc_id).second) {
      throw ValidationError("run", 0, "query " + run.query_id + ": duplicate doc " + e.doc_id);
    }
  }
}

}  // namespace rrscale
