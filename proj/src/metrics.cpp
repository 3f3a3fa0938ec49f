#include "ctcws/metrics.hpp"

#include <algorithm>

#include "ctcws/core_types.hpp"
#include "ctcws/utf8.hpp"

namespace ctcws {

EditScript AlignWords(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  // cost[i][j]: edit distance between ref[i..] and hyp[j..].
  std::vector<std::vector<std::size_t>> cost(n + 1,
                                             std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        cost[i][j] = m - j;
      } else if (j == m) {
        cost[i][j] = n - i;
      } else {
        const std::size_t diag = cost[i + 1][j + 1] + (ref[i] == hyp[j] ? 0 : 1);
        cost[i][j] = std::min({diag, cost[i + 1][j] + 1, cost[i][j + 1] + 1});
      }
    }
  }

  EditScript script;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    const int ri = static_cast<int>(i);
    const int hj = static_cast<int>(j);
    if (i < n && j < m) {
      const bool same = ref[i] == hyp[j];
      if (cost[i][j] == cost[i + 1][j + 1] + (same ? 0 : 1)) {
        script.push_back({same ? EditOp::kMatch : EditOp::kSubstitution, ri, hj});
        ++i;
        ++j;
        continue;
      }
    }
    if (i < n && cost[i][j] == cost[i + 1][j] + 1) {
      script.push_back({EditOp::kDeletion, ri, -1});
      ++i;
      continue;
    }
    script.push_back({EditOp::kInsertion, -1, hj});
    ++j;
  }
  return script;
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_words += o.ref_words;
  return *this;
}

ErrorCounts CountErrors(const EditScript& script, std::size_t ref_words) {
  ErrorCounts c;
  c.ref_words = ref_words;
  for (const auto& p : script) {
    switch (p.op) {
      case EditOp::kMatch: break;
      case EditOp::kSubstitution: ++c.substitutions; break;
      case EditOp::kDeletion: ++c.deletions; break;
      case EditOp::kInsertion: ++c.insertions; break;
    }
  }
  return c;
}

WerResult ComputeWer(const ErrorCounts& counts) {
  WerResult r;
  if (counts.ref_words == 0) {
    r.empty_reference = counts.insertions > 0;
    r.percent = 100.0 * static_cast<double>(counts.insertions);
    return r;
  }
  r.percent = 100.0 * static_cast<double>(counts.errors()) /
              static_cast<double>(counts.ref_words);
  return r;
}

double Wer(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp) {
  return ComputeWer(CountErrors(AlignWords(ref, hyp), ref.size())).percent;
}

WordCounts& WordCounts::operator+=(const WordCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

std::vector<std::string> FusePhrases(const std::vector<std::string>& words,
                                     const std::set<std::string>& phrases) {
  std::vector<std::vector<std::string>> split;
  for (const auto& p : phrases) {
    auto parts = SplitWords(p);
    if (parts.size() > 1) split.push_back(std::move(parts));
  }
  if (split.empty()) return words;
  std::stable_sort(split.begin(), split.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size();) {
    bool fused = false;
    for (const auto& parts : split) {
      if (i + parts.size() > words.size()) continue;
      if (std::equal(parts.begin(), parts.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
        out.push_back(JoinWords(parts));
        i += parts.size();
        fused = true;
        break;
      }
    }
    if (!fused) out.push_back(words[i++]);
  }
  return out;
}

PerWordCounts ScoreContextWords(const EditScript& script,
                                const std::vector<std::string>& ref,
                                const std::vector<std::string>& hyp,
                                const std::set<std::string>& biasing_words) {
  PerWordCounts counts;
  auto in_set = [&](const std::string& w) { return biasing_words.count(w) > 0; };
  for (const auto& p : script) {
    const std::string* r = p.ref >= 0 ? &ref[static_cast<std::size_t>(p.ref)] : nullptr;
    const std::string* h = p.hyp >= 0 ? &hyp[static_cast<std::size_t>(p.hyp)] : nullptr;
    if (p.op == EditOp::kMatch) {
      if (in_set(*r)) ++counts[*r].tp;
      continue;
    }
    if (r && in_set(*r)) ++counts[*r].fn;
    if (h && in_set(*h)) ++counts[*h].fp;
  }
  return counts;
}

double FScore(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

PrfScore ComputePrf(const WordCounts& totals) {
  PrfScore s;
  if (totals.tp + totals.fp > 0) {
    s.precision = static_cast<double>(totals.tp) / static_cast<double>(totals.tp + totals.fp);
  }
  if (totals.tp + totals.fn > 0) {
    s.recall = static_cast<double>(totals.tp) / static_cast<double>(totals.tp + totals.fn);
  }
  s.fscore = FScore(s.precision, s.recall);
  return s;
}

void EvalReport::add(const std::string& reference, const std::string& hypothesis,
                     const std::set<std::string>& biasing_words) {
  const auto ref = FusePhrases(SplitWords(reference), biasing_words);
  const auto hyp = FusePhrases(SplitWords(hypothesis), biasing_words);
  const auto script = AlignWords(ref, hyp);
  // WER is computed on unfused words so it does not depend on the list.
  const auto plain_ref = SplitWords(reference);
  const auto plain_hyp = SplitWords(hypothesis);
  const auto counts = CountErrors(AlignWords(plain_ref, plain_hyp), plain_ref.size());
  errors += counts;
  if (ComputeWer(counts).empty_reference) ++empty_reference_utterances;
  for (const auto& [word, c] : ScoreContextWords(script, ref, hyp, biasing_words)) {
    per_word[word] += c;
    totals += c;
  }
  ++utterances;
}

EvalReport& EvalReport::operator+=(const EvalReport& o) {
  errors += o.errors;
  totals += o.totals;
  for (const auto& [w, c] : o.per_word) per_word[w] += c;
  utterances += o.utterances;
  empty_reference_utterances += o.empty_reference_utterances;
  decode_seconds += o.decode_seconds;
  return *this;
}

nlohmann::json EvalReport::to_json() const {
  const auto s = prf();
  nlohmann::json j;
  j["wer"] = wer();
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["fscore"] = s.fscore;
  j["tp"] = totals.tp;
  j["fp"] = totals.fp;
  j["fn"] = totals.fn;
  j["substitutions"] = errors.substitutions;
  j["deletions"] = errors.deletions;
  j["insertions"] = errors.insertions;
  j["ref_words"] = errors.ref_words;
  j["utterances"] = utterances;
  j["empty_reference_utterances"] = empty_reference_utterances;
  j["decode_seconds"] = decode_seconds;
  nlohmann::json words = nlohmann::json::object();
  for (const auto& [w, c] : per_word) {
    const auto ws = ComputePrf(c);
    words[w] = {{"tp", c.tp},
                {"fp", c.fp},
                {"fn", c.fn},
                {"precision", ws.precision},
                {"recall", ws.recall},
                {"fscore", ws.fscore}};
  }
  j["per_word"] = std::move(words);
  return j;
}

std::vector<MinedEntry> MineBiasingList(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    std::size_t min_len, double max_accuracy) {
  std::map<std::string, MinedEntry> stats;
  for (const auto& [reference, hypothesis] : pairs) {
    const auto ref = SplitWords(reference);
    const auto hyp = SplitWords(hypothesis);
    std::vector<int> matched_hyp(ref.size(), -1);
    for (const auto& p : AlignWords(ref, hyp)) {
      if (p.op == EditOp::kMatch) matched_hyp[static_cast<std::size_t>(p.ref)] = p.hyp;
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      auto& uni = stats[ref[i]];
      uni.text = ref[i];
      ++uni.frequency;
      if (matched_hyp[i] >= 0) ++uni.recognized;
      if (i + 1 < ref.size()) {
        const std::string bigram = ref[i] + " " + ref[i + 1];
        auto& bi = stats[bigram];
        bi.text = bigram;
        ++bi.frequency;
        if (matched_hyp[i] >= 0 && matched_hyp[i + 1] == matched_hyp[i] + 1) {
          ++bi.recognized;
        }
      }
    }
  }
  std::vector<MinedEntry> out;
  for (auto& [text, e] : stats) {
    if (Utf8Length(text) < min_len) continue;
    if (e.accuracy() > max_accuracy) continue;
    out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const MinedEntry& a, const MinedEntry& b) {
    return a.frequency > b.frequency;
  });
  return out;
}

}  // namespace ctcws
