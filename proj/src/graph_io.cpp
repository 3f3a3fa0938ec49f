#include "ctcws/graph_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ctcws {

namespace {

constexpr std::array<char, 4> kGraphMagic = {'C', 'T', 'C', 'G'};
constexpr std::uint8_t kGraphVersion = 1;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, "graph file truncated");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void WriteGraph(std::ostream& out, const ContextGraph& graph,
                const Vocabulary& vocab) {
  std::string bytes(kGraphMagic.begin(), kGraphMagic.end());
  bytes.push_back(static_cast<char>(kGraphVersion));
  bytes.append(3, '\0');
  PutU64(bytes, vocab.fingerprint());
  PutU32(bytes, static_cast<std::uint32_t>(graph.entries().size()));
  for (const auto& e : graph.entries()) {
    PutU32(bytes, static_cast<std::uint32_t>(e.canonical.size()));
    bytes += e.canonical;
    PutU32(bytes, static_cast<std::uint32_t>(e.transcriptions.size()));
    for (const auto& seq : e.transcriptions) {
      PutU32(bytes, static_cast<std::uint32_t>(seq.size()));
      for (TokenId id : seq) PutU32(bytes, static_cast<std::uint32_t>(id));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "graph write failed");
}

ContextGraph ReadGraph(std::istream& in, const Vocabulary& vocab) {
  Reader r(std::string{std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>()});
  if (r.str(4) != std::string(kGraphMagic.begin(), kGraphMagic.end())) {
    throw Error(ErrorCode::kMagicMismatch, "not a CTCG graph file");
  }
  const auto version = r.uint(1);
  if (version != kGraphVersion) {
    throw Error(ErrorCode::kInvalidValue,
                "unsupported graph version " + std::to_string(version));
  }
  r.uint(3);
  if (r.uint(8) != vocab.fingerprint()) {
    throw Error(ErrorCode::kVocabularyMismatch,
                "graph was built against a different vocabulary");
  }
  std::vector<BiasingEntry> entries(r.uint(4));
  for (auto& e : entries) {
    e.canonical = r.str(r.uint(4));
    e.transcriptions.resize(r.uint(4));
    for (auto& seq : e.transcriptions) {
      seq.resize(r.uint(4));
      for (auto& id : seq) id = static_cast<TokenId>(r.uint(4));
    }
  }
  if (!r.done()) throw Error(ErrorCode::kInvalidValue, "trailing bytes in graph file");
  return BuildGraph(std::move(entries), vocab);
}

void WriteGraphFile(const std::filesystem::path& path, const ContextGraph& graph,
                    const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteGraph(out, graph, vocab);
}

ContextGraph ReadGraphFile(const std::filesystem::path& path,
                           const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadGraph(in, vocab);
}

}  // namespace ctcws
