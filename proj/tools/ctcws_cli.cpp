// Command-line front end: build-graph, decode, eval, mine-list, gen-alts.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 partial failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ctcws/alt_transcripts.hpp"
#include "ctcws/context_graph.hpp"
#include "ctcws/graph_io.hpp"
#include "ctcws/metrics.hpp"
#include "ctcws/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ctcws;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kPartial = 3;

struct VocabArgs {
  std::string path;
  int blank_id = -1;
  std::string marker{kDefaultBoundaryMarker};

  void add_to(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--vocab", path, "token list, one per line");
    if (required) opt->required();
    cmd->add_option("--blank-id", blank_id, "blank token id (default: last)");
    cmd->add_option("--boundary-marker", marker, "word boundary marker");
  }
  Vocabulary load() const { return LoadVocabularyFile(path, blank_id, marker); }
};

struct ListArgs {
  std::string context;
  std::string pretokenized;
  std::string wordlist;
  std::string manual_alts;
  bool no_auto_alts = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--context", context, "context list: canonical[<TAB>spelling]*");
    cmd->add_option("--pretokenized", pretokenized,
                    "entries as canonical<TAB>tok tok ..[<TAB>tok ..]*");
    cmd->add_option("--wordlist", wordlist, "frequency-ranked words for compound splits");
    cmd->add_option("--manual-alts", manual_alts, "word<TAB>alternative[<TAB>..]*");
    cmd->add_flag("--no-auto-alts", no_auto_alts, "skip abbreviation/compound variants");
  }
};

struct ListResult {
  std::vector<BiasingEntry> entries;
  std::vector<std::vector<std::string>> surfaces;
  std::vector<ExpandWarning> warnings;
};

std::ifstream OpenText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

// Lines of `canonical<TAB>tok tok ...` naming tokens by their vocabulary text.
std::vector<BiasingEntry> LoadPretokenized(const std::string& path,
                                           const Vocabulary& vocab) {
  auto in = OpenText(path);
  std::vector<BiasingEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (cols.size() < 2) {
      throw Error(ErrorCode::kInvalidValue, "pretokenized line without tokens: " + line);
    }
    BiasingEntry e{cols[0], {}};
    for (std::size_t i = 1; i < cols.size(); ++i) {
      TokenSequence seq;
      for (const auto& tok : SplitWords(cols[i])) {
        auto id = vocab.find(tok);
        if (!id) throw Error(ErrorCode::kUnsegmentable, "unknown token " + tok);
        seq.push_back(*id);
      }
      e.transcriptions.push_back(std::move(seq));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

ListResult LoadList(const ListArgs& args, const Vocabulary& vocab) {
  ListResult out;
  if (!args.pretokenized.empty()) {
    out.entries = LoadPretokenized(args.pretokenized, vocab);
  }
  if (args.context.empty()) return out;
  const auto items = LoadContextListFile(args.context);
  const WordCostDictionary dict =
      args.wordlist.empty() ? WordCostDictionary{} : LoadWordListFile(args.wordlist);
  const ManualAlternatives manual = args.manual_alts.empty()
                                        ? ManualAlternatives{}
                                        : LoadManualAlternativesFile(args.manual_alts);
  auto expanded = ExpandEntries(items, vocab, dict, manual,
                                {.auto_alternatives = !args.no_auto_alts});
  for (auto& e : expanded.entries) out.entries.push_back(std::move(e));
  out.surfaces = std::move(expanded.surfaces);
  out.warnings = std::move(expanded.warnings);
  return out;
}

bool AnyDropped(const std::vector<ExpandWarning>& warnings) {
  for (const auto& w : warnings) {
    if (w.entry_dropped) return true;
  }
  return false;
}

void ReportWarnings(const std::vector<ExpandWarning>& warnings) {
  for (const auto& w : warnings) {
    std::cerr << (w.entry_dropped ? "error: dropped entry '" : "warning: skipped '")
              << w.surface << "' of '" << w.canonical << "': " << w.message << "\n";
  }
}

struct SpotterArgs {
  SpotterConfig cfg;
  bool no_pruning = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--cb-w", cfg.cb_w, "context-biasing weight")->capture_default_str();
    cmd->add_option("--ctc-w", cfg.ctc_w, "greedy word score weight")->capture_default_str();
    cmd->add_option("--beta-thr", cfg.beta_thr, "blank skip threshold (log)")
        ->capture_default_str();
    cmd->add_option("--gamma-thr", cfg.gamma_thr, "word start threshold (log)")
        ->capture_default_str();
    cmd->add_option("--beam-thr", cfg.beam_thr, "beam width")->capture_default_str();
    cmd->add_flag("--no-pruning", no_pruning, "exact search, no gates or pruning");
  }
  SpotterConfig get() const {
    SpotterConfig c = cfg;
    c.pruning_enabled = !no_pruning;
    c.validate();
    return c;
  }
};

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

// build-graph -------------------------------------------------------------

struct BuildGraphCmd {
  VocabArgs vocab;
  ListArgs list;
  std::string out;
  std::string dot;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("build-graph", "build and serialize a context graph");
    vocab.add_to(cmd);
    list.add_to(cmd);
    cmd->add_option("--out", out, "graph file")->required();
    cmd->add_option("--dot", dot, "also write a Graphviz rendering");
    cmd->callback([this] { code = run(); });
  }

  int run() {
    if (list.context.empty() && list.pretokenized.empty()) {
      throw CLI::RequiredError("--context or --pretokenized");
    }
    const auto v = vocab.load();
    auto lr = LoadList(list, v);
    ReportWarnings(lr.warnings);
    const auto graph = BuildGraph(std::move(lr.entries), v);
    WriteGraphFile(out, graph, v);
    if (!dot.empty()) WriteOutput(dot, ExportDot(graph, v));
    nlohmann::json stats{{"entries", graph.entries().size()},
                         {"transcriptions", graph.num_transcriptions()},
                         {"nodes", graph.num_nodes()},
                         {"duplicate_transcriptions", graph.duplicates().size()},
                         {"warnings", lr.warnings.size()}};
    std::cout << stats.dump() << "\n";
    return AnyDropped(lr.warnings) ? kPartial : kOk;
  }

  int code = kOk;
};

// decode ------------------------------------------------------------------

struct DecodeCmd {
  VocabArgs vocab;
  ListArgs list;
  SpotterArgs spotter;
  std::string manifest;
  std::string graph;
  std::string out;
  std::string stats;
  std::string mode = "ctc";
  int workers = 1;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("decode", "greedy decode with context biasing");
    vocab.add_to(cmd);
    list.add_to(cmd);
    spotter.add_to(cmd);
    cmd->add_option("--manifest", manifest, "JSON-lines manifest")->required();
    cmd->add_option("--graph", graph, "graph file from build-graph");
    cmd->add_option("--out", out, "results JSON-lines (default stdout)");
    cmd->add_option("--stats", stats, "timing summary JSON");
    cmd->add_option("--mode", mode, "ctc or transducer")
        ->check(CLI::IsMember({"ctc", "transducer"}))
        ->capture_default_str();
    cmd->add_option("--workers", workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto cfg = spotter.get();
    const auto v = vocab.load();
    ContextGraph g;
    if (!graph.empty()) {
      if (!list.context.empty() || !list.pretokenized.empty()) {
        throw CLI::ValidationError("--graph", "cannot be combined with a context list");
      }
      g = ReadGraphFile(graph, v);
    } else {
      auto lr = LoadList(list, v);
      ReportWarnings(lr.warnings);
      g = BuildGraph(std::move(lr.entries), v);
    }
    const auto decode_mode = mode == "transducer" ? DecodeMode::kTransducer : DecodeMode::kCtc;
    const auto records = LoadManifestFile(manifest);
    const auto utts = LoadUtterances(records, decode_mode, workers);

    // Timed region: decoding only, files are already in memory.
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = DecodeBatch(utts, v, g, cfg, decode_mode, workers);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    WriteOutput(out, ResultsToJsonl(results));
    std::size_t failed = 0;
    for (const auto& r : results) {
      if (r.error) {
        ++failed;
        std::cerr << "error: " << r.id << ": " << *r.error << "\n";
      }
    }
    std::cerr << "decoded " << results.size() << " utterances in " << secs << " s\n";
    if (!stats.empty()) {
      WriteOutput(stats, nlohmann::json{{"decode_seconds", secs},
                                        {"utterances", results.size()},
                                        {"failed", failed},
                                        {"workers", workers}}
                             .dump() +
                             "\n");
    }
    return failed ? kPartial : kOk;
  }

  int code = kOk;
};

// eval --------------------------------------------------------------------

std::set<std::string> BiasingWords(const std::string& context) {
  std::set<std::string> words;
  for (const auto& item : LoadContextListFile(context)) words.insert(item.canonical);
  return words;
}

struct EvalCmd {
  std::string results;
  std::string context;
  std::string manifest;
  std::string stats;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "WER and biasing-word P/R/F of decode results");
    cmd->add_option("--results", results, "decode output")->required();
    cmd->add_option("--context", context, "biasing list scored for P/R/F")->required();
    cmd->add_option("--manifest", manifest, "references for results that lack them");
    cmd->add_option("--stats", stats, "decode --stats file, for decode_seconds");
    cmd->add_option("--out", out, "report JSON (default stdout)");
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto words = BiasingWords(context);
    std::map<std::string, std::string> refs;
    if (!manifest.empty()) {
      for (const auto& r : LoadManifestFile(manifest)) {
        if (r.reference_text) refs[r.id] = *r.reference_text;
      }
    }
    EvalReport report;
    auto in = OpenText(results);
    std::string line;
    std::size_t skipped = 0;
    std::size_t missing = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto id = j.at("id").get<std::string>();
      if (j.contains("error")) {
        ++skipped;
        continue;
      }
      std::optional<std::string> ref;
      if (j.contains("reference")) ref = j["reference"].get<std::string>();
      if (auto it = refs.find(id); !ref && it != refs.end()) ref = it->second;
      if (!ref) {
        ++missing;
        std::cerr << "error: no reference for " << id << "\n";
        continue;
      }
      report.add(*ref, j.at("text").get<std::string>(), words);
    }
    if (missing) {
      throw Error(ErrorCode::kInvalidValue,
                  std::to_string(missing) + " results have no reference text");
    }
    if (report.utterances == 0) {
      throw Error(ErrorCode::kEmptyInput, "no results with references to score");
    }
    if (!stats.empty()) {
      auto s = OpenText(stats);
      report.decode_seconds = nlohmann::json::parse(s).at("decode_seconds").get<double>();
    }
    auto j = report.to_json();
    j["skipped_failed_utterances"] = skipped;
    WriteOutput(out, j.dump(2) + "\n");
    return skipped ? kPartial : kOk;
  }

  int code = kOk;
};

// mine-list ---------------------------------------------------------------

struct MineCmd {
  VocabArgs vocab;
  std::string manifest;
  std::string out;
  std::size_t min_len = 3;
  double max_acc = 0.5;
  double ctc_w = SpotterConfig{}.ctc_w;
  int workers = 1;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "mine-list", "rank poorly recognized words and bigrams from greedy decoding");
    vocab.add_to(cmd);
    cmd->add_option("--manifest", manifest, "manifest with reference texts")->required();
    cmd->add_option("--out", out, "ranked list, one entry per line (default stdout)");
    cmd->add_option("--min-len", min_len, "minimum characters")->capture_default_str();
    cmd->add_option("--max-acc", max_acc, "maximum recognition accuracy")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--workers", workers, "loader threads")->check(CLI::PositiveNumber);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto v = vocab.load();
    const auto records = LoadManifestFile(manifest);
    if (records.empty()) throw Error(ErrorCode::kEmptyInput, "manifest is empty");
    const auto utts = LoadUtterances(records, DecodeMode::kCtc, workers);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t failed = 0;
    for (const auto& u : utts) {
      if (u.load_error) {
        ++failed;
        std::cerr << "error: " << u.id << ": " << *u.load_error << "\n";
        continue;
      }
      if (!u.reference) continue;
      pairs.emplace_back(*u.reference, GreedyCtcAlign(u.logprobs, v, ctc_w).text());
    }
    if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no references in manifest");
    const auto mined = MineBiasingList(pairs, min_len, max_acc);
    std::string list;
    for (const auto& m : mined) {
      list += m.text + "\n";
      std::cerr << m.text << "\tfrequency=" << m.frequency
                << "\trecognized=" << m.recognized << "\n";
    }
    WriteOutput(out, list);
    return failed ? kPartial : kOk;
  }

  int code = kOk;
};

// gen-alts ----------------------------------------------------------------

struct GenAltsCmd {
  VocabArgs vocab;
  ListArgs list;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "gen-alts", "write the context list with generated alternative spellings");
    vocab.add_to(cmd);
    list.add_to(cmd);
    cmd->add_option("--out", out, "expanded context list (default stdout)");
    cmd->callback([this] { code = run(); });
  }

  int run() {
    if (list.context.empty()) throw CLI::RequiredError("--context");
    const auto v = vocab.load();
    const auto lr = LoadList(list, v);
    ReportWarnings(lr.warnings);
    std::string text;
    for (const auto& surfaces : lr.surfaces) {
      for (std::size_t i = 0; i < surfaces.size(); ++i) {
        if (i) text.push_back('\t');
        text += surfaces[i];
      }
      text.push_back('\n');
    }
    WriteOutput(out, text);
    return AnyDropped(lr.warnings) ? kPartial : kOk;
  }

  int code = kOk;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTC word spotting context biasing"};
  app.require_subcommand(1);
  BuildGraphCmd build_graph;
  DecodeCmd decode;
  EvalCmd eval;
  MineCmd mine;
  GenAltsCmd gen_alts;
  build_graph.add(app);
  decode.add(app);
  eval.add(app);
  mine.add(app);
  gen_alts.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  for (const auto* cmd : {&build_graph.code, &decode.code, &eval.code, &mine.code,
                          &gen_alts.code}) {
    if (*cmd != kOk) return *cmd;
  }
  return kOk;
}
