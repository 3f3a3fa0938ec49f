#include "ctcws/core_types.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>

#include "json.hpp"

namespace ctcws {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateToken: return "DuplicateToken";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMagicMismatch: return "MagicMismatch";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kUnsegmentable: return "Unsegmentable";
    case ErrorCode::kDuplicateTranscription: return "DuplicateTranscription";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOverlappingWords: return "OverlappingWords";
    case ErrorCode::kVocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenId blank_id,
                       std::string boundary_marker)
    : tokens_(std::move(tokens)), marker_(std::move(boundary_marker)) {
  if (tokens_.empty()) throw Error(ErrorCode::kEmptyInput, "empty vocabulary");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) {
      throw Error(ErrorCode::kInvalidValue,
                  "empty token at index " + std::to_string(i));
    }
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kDuplicateToken,
                  "token '" + tokens_[i] + "' at index " + std::to_string(i));
    }
  }
  blank_id_ = blank_id < 0 ? static_cast<TokenId>(tokens_.size() - 1) : blank_id;
  if (static_cast<std::size_t>(blank_id_) >= tokens_.size()) {
    throw Error(ErrorCode::kInvalidValue,
                "blank id " + std::to_string(blank_id_) + " out of range");
  }
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::is_separator(TokenId id) const {
  return id != blank_id_ && !marker_.empty() && tokens_[id] == marker_;
}

bool Vocabulary::starts_word(TokenId id) const {
  return id != blank_id_ && !marker_.empty() &&
         tokens_[id].size() > marker_.size() &&
         tokens_[id].compare(0, marker_.size(), marker_) == 0;
}

std::string_view Vocabulary::surface(TokenId id) const {
  std::string_view t = tokens_[id];
  if (!marker_.empty() && t.substr(0, marker_.size()) == marker_) {
    t.remove_prefix(marker_.size());
  }
  return t;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& t : tokens_) {
    mix(t);
    mix(std::string_view("\n", 1));
  }
  mix(std::to_string(blank_id_));
  mix(std::string_view("\0", 1));
  mix(marker_);
  return h;
}

Vocabulary LoadVocabulary(std::istream& in, TokenId blank_id,
                          std::string boundary_marker) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "empty vocabulary");
  return Vocabulary(std::move(tokens), blank_id, std::move(boundary_marker));
}

Vocabulary LoadVocabularyFile(const std::filesystem::path& path,
                              TokenId blank_id, std::string boundary_marker) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return LoadVocabulary(in, blank_id, std::move(boundary_marker));
}

// ---------------------------------------------------------------------------
// LogProbMatrix

namespace {

void CheckValues(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = values[i];
    if (std::isnan(v) || v > 0.0f) {
      throw Error(ErrorCode::kInvalidValue,
                  "value " + std::to_string(v) + " at offset " +
                      std::to_string(i) + " is not a log-probability");
    }
  }
}

}  // namespace

LogProbMatrix::LogProbMatrix(std::size_t frames, std::size_t vocab_size,
                             std::vector<float> values, bool normalized)
    : frames_(frames),
      vocab_size_(vocab_size),
      values_(std::move(values)),
      normalized_(normalized) {
  if (values_.size() != frames_ * vocab_size_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(frames_ * vocab_size_) +
                    " values, got " + std::to_string(values_.size()));
  }
  CheckValues(values_);
  if (normalized_) {
    for (std::size_t t = 0; t < frames_; ++t) {
      const double lse = row_logsumexp(t);
      if (!(std::abs(lse) <= kNormalizationTolerance)) {
        throw Error(ErrorCode::kNotNormalized,
                    "row " + std::to_string(t) + " log-sum-exp " +
                        std::to_string(lse));
      }
    }
  }
}

double LogProbMatrix::row_logsumexp(std::size_t t) const {
  const auto r = row(t);
  if (r.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(r.begin(), r.end());
  if (std::isinf(mx)) return mx;
  double acc = 0.0;
  for (float v : r) acc += std::exp(static_cast<double>(v) - mx);
  return mx + std::log(acc);
}

namespace {

constexpr std::array<char, 4> kLogProbMagic = {'C', 'T', 'C', 'L'};
constexpr std::uint8_t kLogProbVersion = 1;
constexpr std::size_t kLogProbHeaderSize = 16;

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

LogProbMatrix LoadLogProbs(std::istream& in) {
  std::string bytes{std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>()};
  if (bytes.size() < kLogProbHeaderSize) {
    if (bytes.size() >= 4 &&
        std::memcmp(bytes.data(), kLogProbMagic.data(), 4) != 0) {
      throw Error(ErrorCode::kMagicMismatch, "not a CTCL file");
    }
    throw Error(ErrorCode::kTruncated, "header shorter than 16 bytes");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, kLogProbMagic.data(), 4) != 0) {
    throw Error(ErrorCode::kMagicMismatch, "not a CTCL file");
  }
  if (p[4] != kLogProbVersion) {
    throw Error(ErrorCode::kInvalidValue,
                "unsupported version " + std::to_string(p[4]));
  }
  const std::uint8_t flags = p[5];
  if ((flags & ~1u) != 0 || p[6] != 0 || p[7] != 0) {
    throw Error(ErrorCode::kInvalidValue, "reserved header bits set");
  }
  const std::uint64_t frames = ReadU32(p + 8);
  const std::uint64_t vocab = ReadU32(p + 12);
  const std::uint64_t expected = frames * vocab * 4;
  const std::uint64_t payload = bytes.size() - kLogProbHeaderSize;
  if (payload < expected) {
    throw Error(ErrorCode::kTruncated,
                "payload " + std::to_string(payload) + " bytes, expected " +
                    std::to_string(expected));
  }
  if (payload > expected) {
    throw Error(ErrorCode::kInvalidValue, "trailing bytes after payload");
  }
  std::vector<float> values(frames * vocab);
  const unsigned char* src = p + kLogProbHeaderSize;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(ReadU32(src + 4 * i));
  }
  return LogProbMatrix(frames, vocab, std::move(values), (flags & 1u) != 0);
}

void WriteLogProbs(std::ostream& out, const LogProbMatrix& m) {
  std::string bytes(kLogProbMagic.begin(), kLogProbMagic.end());
  bytes.push_back(static_cast<char>(kLogProbVersion));
  bytes.push_back(static_cast<char>(m.normalized() ? 1 : 0));
  bytes.push_back(0);
  bytes.push_back(0);
  PutU32(bytes, static_cast<std::uint32_t>(m.frames()));
  PutU32(bytes, static_cast<std::uint32_t>(m.vocab_size()));
  bytes.reserve(bytes.size() + m.values().size() * 4);
  for (float v : m.values()) PutU32(bytes, std::bit_cast<std::uint32_t>(v));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed");
}

LogProbMatrix LoadLogProbsTsv(std::istream& in) {
  std::vector<float> values;
  std::size_t frames = 0;
  std::size_t vocab = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t cols = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) tab = line.size();
      const std::string cell = line.substr(pos, tab - pos);
      // strtof accepts "nan"/"-inf", which from_chars on some toolchains won't.
      char* end = nullptr;
      const float v = std::strtof(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw Error(ErrorCode::kInvalidValue,
                    "bad number '" + cell + "' on line " +
                        std::to_string(frames + 1));
      }
      values.push_back(v);
      ++cols;
      pos = tab + 1;
    }
    if (frames == 0) {
      vocab = cols;
    } else if (cols != vocab) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(frames + 1) + " has " +
                      std::to_string(cols) + " columns, expected " +
                      std::to_string(vocab));
    }
    ++frames;
  }
  CheckValues(values);
  LogProbMatrix probe(frames, vocab, values, false);
  bool normalized = true;
  for (std::size_t t = 0; t < frames && normalized; ++t) {
    normalized = std::abs(probe.row_logsumexp(t)) <= kNormalizationTolerance;
  }
  return LogProbMatrix(frames, vocab, std::move(values), normalized);
}

LogProbMatrix LoadLogProbsFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".tsv" || ext == ".txt") return LoadLogProbsTsv(in);
  return LoadLogProbs(in);
}

// ---------------------------------------------------------------------------
// SpotterConfig

void SpotterConfig::validate() const {
  if (!(beta_thr <= 0.0)) throw Error(ErrorCode::kInvalidValue, "beta_thr must be <= 0");
  if (!(gamma_thr <= 0.0)) throw Error(ErrorCode::kInvalidValue, "gamma_thr must be <= 0");
  if (!(beam_thr > 0.0)) throw Error(ErrorCode::kInvalidValue, "beam_thr must be > 0");
  if (!(ctc_w >= 0.0)) throw Error(ErrorCode::kInvalidValue, "ctc_w must be >= 0");
  if (!std::isfinite(cb_w)) throw Error(ErrorCode::kInvalidValue, "cb_w must be finite");
}

// ---------------------------------------------------------------------------
// Manifest

std::vector<UtteranceRecord> LoadManifest(std::istream& in,
                                          const std::filesystem::path& base_dir) {
  std::vector<UtteranceRecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&base_dir](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidValue,
                  "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("logprobs") || !j["logprobs"].is_string()) {
      throw Error(ErrorCode::kInvalidValue,
                  "manifest line " + std::to_string(line_no) +
                      " needs string fields 'id' and 'logprobs'");
    }
    UtteranceRecord rec;
    rec.id = j["id"].get<std::string>();
    if (rec.id.empty()) {
      throw Error(ErrorCode::kInvalidValue,
                  "manifest line " + std::to_string(line_no) + ": empty id");
    }
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorCode::kInvalidValue, "duplicate manifest id " + rec.id);
    }
    rec.logprob_source = resolve(j["logprobs"].get<std::string>());
    if (j.contains("text") && j["text"].is_string()) {
      rec.reference_text = j["text"].get<std::string>();
    }
    if (j.contains("transducer_alignment") &&
        j["transducer_alignment"].is_string()) {
      rec.transducer_alignment_source =
          resolve(j["transducer_alignment"].get<std::string>());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<UtteranceRecord> LoadManifestFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return LoadManifest(in, path.parent_path());
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) words.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

std::string JoinWords(std::span<const std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

}  // namespace ctcws
