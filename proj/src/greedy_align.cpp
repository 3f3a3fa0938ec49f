#include "ctcws/greedy_align.hpp"

#include <fstream>
#include <limits>

#include "json.hpp"

namespace ctcws {

std::string WordAlignment::text() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i].word;
  }
  return out;
}

WordAlignment GreedyCtcAlign(const LogProbMatrix& logprobs,
                             const Vocabulary& vocab, double ctc_w) {
  if (logprobs.vocab_size() != vocab.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "logprob matrix has " + std::to_string(logprobs.vocab_size()) +
                    " columns, vocabulary has " + std::to_string(vocab.size()));
  }
  WordAlignment ali;
  ali.frames = logprobs.frames();
  const TokenId blank = vocab.blank_id();

  bool open = false;
  AlignedWord cur;
  double lp_sum = 0.0;
  auto close = [&] {
    if (open && !cur.word.empty()) {
      cur.score = ctc_w * lp_sum;
      ali.words.push_back(std::move(cur));
    }
    open = false;
    cur = AlignedWord{};
    lp_sum = 0.0;
  };

  TokenId prev = -1;
  for (std::size_t ft = 0; ft < logprobs.frames(); ++ft) {
    const auto t = static_cast<std::int32_t>(ft);
    const auto row = logprobs.row(ft);
    TokenId best = 0;
    for (std::size_t v = 1; v < row.size(); ++v) {
      if (row[v] > row[static_cast<std::size_t>(best)]) best = static_cast<TokenId>(v);
    }
    const bool repeat = best == prev;
    prev = best;
    if (best == blank) continue;
    if (vocab.is_separator(best)) {
      close();
      continue;
    }
    if (repeat) {
      // Continuation of the current run.
      lp_sum += row[static_cast<std::size_t>(best)];
      cur.end_frame = t;
      continue;
    }
    if (vocab.starts_word(best)) close();
    if (!open) {
      open = true;
      cur.start_frame = t;
    }
    cur.word += vocab.surface(best);
    lp_sum += row[static_cast<std::size_t>(best)];
    cur.end_frame = t;
  }
  close();
  return ali;
}

namespace {

void CheckOrdered(const WordAlignment& ali) {
  for (std::size_t i = 0; i < ali.words.size(); ++i) {
    const auto& w = ali.words[i];
    if (w.start_frame < 0 || w.end_frame < 0) {
      throw Error(ErrorCode::kInvalidValue, "negative frame for '" + w.word + "'");
    }
    if (w.start_frame > w.end_frame) {
      throw Error(ErrorCode::kInvalidValue,
                  "start after end for '" + w.word + "'");
    }
    if (i > 0) {
      const auto& p = ali.words[i - 1];
      if (w.start_frame < p.start_frame) {
        throw Error(ErrorCode::kOverlappingWords,
                    "unsorted words '" + p.word + "' and '" + w.word + "'");
      }
      if (w.start_frame <= p.end_frame) {
        throw Error(ErrorCode::kOverlappingWords,
                    "'" + p.word + "' [" + std::to_string(p.start_frame) + "," +
                        std::to_string(p.end_frame) + "] overlaps '" + w.word +
                        "' [" + std::to_string(w.start_frame) + "," +
                        std::to_string(w.end_frame) + "]");
      }
    }
  }
}

}  // namespace

WordAlignment LoadTransducerAlignment(std::istream& in) {
  WordAlignment ali;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AlignedWord w;
    try {
      const auto j = nlohmann::json::parse(line);
      w.word = j.at("word").get<std::string>();
      w.start_frame = j.at("start_frame").get<std::int32_t>();
      w.end_frame = j.at("end_frame").get<std::int32_t>();
      if (j.contains("score") && !j["score"].is_null()) {
        w.score = j["score"].get<double>();
      } else {
        w.score = -std::numeric_limits<double>::infinity();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidValue,
                  "alignment line " + std::to_string(line_no) + ": " + e.what());
    }
    if (w.word.empty()) {
      throw Error(ErrorCode::kInvalidValue,
                  "alignment line " + std::to_string(line_no) + ": empty word");
    }
    ali.words.push_back(std::move(w));
  }
  CheckOrdered(ali);
  if (!ali.words.empty()) {
    ali.frames = static_cast<std::size_t>(ali.words.back().end_frame) + 1;
  }
  return ali;
}

WordAlignment LoadTransducerAlignmentFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return LoadTransducerAlignment(in);
}

}  // namespace ctcws
