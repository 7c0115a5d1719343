#include "rrscale/qrels.hpp"

#include "rrscale/errors.hpp"

namespace rrscale {

void Qrels::set(std::string_view query_id, std::string_view doc_id, int grade) {
  if (grade < 0 || grade > kMaxGrade) {
    throw ArgumentError("grade " + std::to_string(grade) + " outside {0,1,2,3} for (" +
                        std::string(query_id) + ", " + std::string(doc_id) + ")");
  }
  auto it = table_.find(query_id);
  if (it == table_.end()) {
    it = table_.emplace(std::string(query_id), Judgments{}).first;
  }
  it->second.insert_or_assign(std::string(doc_id), grade);
}

int Qrels::grade(std::string_view query_id, std::string_view doc_id) const {
  const auto q = table_.find(query_id);
  if (q == table_.end()) {
    return 0;
  }
  const auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

bool Qrels::has_query(std::string_view query_id) const {
  return table_.find(query_id) != table_.end();
}

const Qrels::Judgments& Qrels::judgments(std::string_view query_id) const {
  static const Judgments kEmpty;
  const auto q = table_.find(query_id);
  return q == table_.end() ? kEmpty : q->second;
}

std::vector<std::string> Qrels::positives(std::string_view query_id) const {
  std::vector<std::string> out;
  for (const auto& [doc, g] : judgments(query_id)) {
    if (g > 0) {
      out.push_back(doc);
    }
  }
  return out;
}

std::size_t Qrels::num_positives(std::string_view query_id) const {
  std::size_t n = 0;
  for (const auto& [doc, g] : judgments(query_id)) {
    n += g > 0 ? 1 : 0;
  }
  return n;
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> ids;
  ids.reserve(table_.size());
  for (const auto& [q, _] : table_) {
    ids.push_back(q);
  }
  return ids;
}

std::size_t Qrels::num_judgments() const {
  std::size_t n = 0;
  for (const auto& [q, j] : table_) {
    n += j.size();
  }
  return n;
}

}  // namespace rrscale
