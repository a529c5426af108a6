// Copyright 2026 The Segtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segtree/cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "segtree/analysis.h"
#include "segtree/boundary.h"
#include "segtree/corpus.h"
#include "segtree/errors.h"
#include "segtree/pruner_learn.h"
#include "segtree/pruning.h"
#include "segtree/tree.h"

namespace segtree::cli {
namespace {

// SEGTREE_LOG: 0 = quiet, 1 = info (default), 2 = debug.
int LogLevel() {
  const char* env = std::getenv("SEGTREE_LOG");
  if (env == nullptr || *env == '\0') return 1;
  const std::string_view value(env);
  if (value == "quiet" || value == "0") return 0;
  if (value == "debug" || value == "2") return 2;
  return 1;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(LogLevel()) {}
  void Info(const std::string& msg) const {
    if (level_ >= 1) err_ << "segtree: " << msg << "\n";
  }
  void Debug(const std::string& msg) const {
    if (level_ >= 2) err_ << "segtree: " << msg << "\n";
  }

 private:
  std::ostream& err_;
  int level_;
};

struct CommonOptions {
  uint64_t seed = 1;
  int jobs = 1;
};

struct TrainOptions {
  std::string input;
  std::string tagger_out;
  std::string pruner_out;
  std::string samples_dump;
  double split = 0.9;
  TaggerConfig tagger;
  PrunerConfig pruner;
};

struct ScoringOptions {
  std::string provider = "pmi";
  std::string scores;
  std::string pmi_corpus;
  std::string strategy = "tdtp";
};

struct SegmentOptions {
  std::string input;
  std::string output;
  std::string predicate = "threshold:0.5";
  std::string dict;
  std::string gold;
  std::string write_scores;
  bool exclude_test_counts = false;
};

struct EvalOptions {
  std::string output;
  std::string gold;
  std::string train;
  std::string csv;
  std::string corpus_name = "corpus";
  std::string predicate_label;
  bool oracle = false;
};

void RequireReadable(const std::string& path, std::string_view what) {
  if (path.empty()) return;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError(std::string(what) + " not found: " + path);
  }
}

void RequireWritable(const std::string& path, std::string_view what) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !std::filesystem::is_directory(parent, ec)) {
    throw IoError(std::string(what) + " directory does not exist: " +
                     parent.string());
  }
}

// Scores (and marginals, for the tagger provider) for a batch of sentences.
struct ScoredBatch {
  std::vector<BoundaryScores> scores;
  std::vector<TagMarginals> marginals;  // empty unless tagger provider
};

ScoredBatch ScoreBatch(const ScoringOptions& opts,
                       std::span<const Sentence> sentences, int jobs,
                       const Log& log) {
  ProviderSpec provider = ParseProviderSpec(opts.provider);
  if (!opts.scores.empty()) {
    provider = {ProviderSpec::Kind::kExternal, opts.scores};
  }
  ScoredBatch batch;
  batch.scores.resize(sentences.size());
  switch (provider.kind) {
    case ProviderSpec::Kind::kExternal: {
      RequireReadable(provider.path, "score file");
      batch.scores = LoadExternalScores(provider.path, sentences);
      break;
    }
    case ProviderSpec::Kind::kPmi: {
      CharStats stats;
      if (!opts.pmi_corpus.empty()) {
        RequireReadable(opts.pmi_corpus, "PMI corpus");
        stats = BuildCharStats(ReadRawCorpus(opts.pmi_corpus));
      } else {
        stats = BuildCharStats(sentences);
      }
      log.Debug("PMI statistics over " + std::to_string(stats.total_chars) +
                " characters");
      ParallelFor(sentences.size(), jobs, [&](size_t k) {
        batch.scores[k] = PmiScores(sentences[k], stats);
      });
      break;
    }
    case ProviderSpec::Kind::kTagger: {
      RequireReadable(provider.path, "tagger model");
      const BoundaryTagger tagger = BoundaryTagger::Load(provider.path);
      batch.marginals.resize(sentences.size());
      ParallelFor(sentences.size(), jobs, [&](size_t k) {
        batch.marginals[k] = tagger.Marginals(sentences[k]);
        batch.scores[k] = BoundaryFromMarginals(batch.marginals[k]);
      });
      break;
    }
  }
  return batch;
}

Lexicon LexiconFromFile(const std::string& path) {
  if (path.empty()) return Lexicon();
  RequireReadable(path, "lexicon corpus");
  return BuildLexicon(ReadSegmentedCorpus(path));
}

Strategy StrategyFlag(const std::string& name) {
  try {
    return ParseStrategy(name);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

int CmdTrain(const TrainOptions& opts, const CommonOptions& common,
             std::ostream& out, const Log& log) {
  RequireReadable(opts.input, "training corpus");
  RequireWritable(opts.tagger_out, "tagger output");
  RequireWritable(opts.pruner_out, "pruner output");

  const auto corpus = ReadSegmentedCorpus(opts.input);
  auto [tagger_part, pruner_part] = SplitCorpus(corpus, opts.split, common.seed);
  if (tagger_part.empty()) {
    throw TrainingError("empty S_b (0 sentences for the boundary tagger)");
  }
  if (pruner_part.empty()) {
    throw TrainingError("empty S_p (0 sentences for the pruner)");
  }
  out << "split: " << tagger_part.size() << " sentences for the tagger, "
      << pruner_part.size() << " for the pruner\n";

  TaggerConfig tagger_config = opts.tagger;
  tagger_config.seed = common.seed;
  log.Info("training boundary tagger");
  const BoundaryTagger tagger = TrainTagger(tagger_part, tagger_config);

  log.Info("collecting pruning samples");
  const auto samples = CollectSamples(pruner_part, tagger);

  PrunerResources resources;
  resources.lexicon = BuildLexicon(tagger_part);
  resources.frequency_text = SentencesOf(tagger_part);
  for (const Sentence& s : SentencesOf(pruner_part)) {
    resources.frequency_text.push_back(s);
  }
  const StringFrequency counts(resources.frequency_text);
  TreeFrequencyIndex tree_index;
  for (const Segmentation& seg : pruner_part) {
    tree_index.AddTree(SegTree::Build(TaggerScores(tagger, seg.sentence())));
  }
  const FeatureSources sources{&resources.lexicon, &tree_index, &counts};
  std::vector<PrunerExample> examples(samples.size());
  ParallelFor(samples.size(), common.jobs, [&](size_t k) {
    examples[k] = {ExtractFeatures(samples[k].context, sources),
                   samples[k].label};
  });
  if (!opts.samples_dump.empty()) {
    WriteText(opts.samples_dump, DumpSamples(examples));
  }

  PrunerConfig pruner_config = opts.pruner;
  pruner_config.seed = common.seed;
  log.Info("training pruner on " + std::to_string(examples.size()) +
           " samples");
  const PruneModel pruner = TrainPruner(examples, pruner_config);

  tagger.Save(opts.tagger_out);
  pruner.Save(opts.pruner_out, &resources);

  const auto merges = std::count_if(examples.begin(), examples.end(),
                                    [](const auto& e) { return e.label == 1; });
  out << "samples: " << examples.size() << " (" << merges << " merge, "
      << examples.size() - merges << " keep)\n";
  out << "pruner held-out accuracy: "
      << (pruner.heldout_accuracy() ? FormatPercent(*pruner.heldout_accuracy())
                                    : std::string("n/a"))
      << "\n";
  return kExitOk;
}

int CmdSegment(const SegmentOptions& opts, const ScoringOptions& scoring,
               const CommonOptions& common, std::ostream& out,
               const Log& log) {
  RequireReadable(opts.input, "input");
  RequireWritable(opts.output, "output");
  const PredicateSpec predicate = ParsePredicateSpec(opts.predicate);
  const Strategy strategy = StrategyFlag(scoring.strategy);
  const ProviderSpec provider = ParseProviderSpec(scoring.provider);
  if (predicate.kind == PredicateSpec::Kind::kLearned &&
      (provider.kind != ProviderSpec::Kind::kTagger || !scoring.scores.empty())) {
    throw UsageError("learned pruning needs --provider tagger:<path>");
  }
  if (predicate.kind == PredicateSpec::Kind::kDictionary && opts.dict.empty()) {
    throw UsageError("predicate 'dict' needs --dict <segmented corpus>");
  }
  if (predicate.kind == PredicateSpec::Kind::kOracle && opts.gold.empty()) {
    throw UsageError("predicate 'oracle' needs --gold <segmented file>");
  }

  const auto sentences = ReadRawLines(opts.input);
  const ScoredBatch batch = ScoreBatch(scoring, sentences, common.jobs, log);
  if (!opts.write_scores.empty()) {
    std::string text;
    for (const auto& s : batch.scores) text += FormatScoresLine(s) + "\n";
    WriteText(opts.write_scores, text);
  }

  Lexicon dictionary;
  std::vector<Segmentation> gold;
  PruneModel pruner;
  PrunerResources resources;
  std::unique_ptr<StringFrequency> counts;
  TreeFrequencyIndex tree_index;
  switch (predicate.kind) {
    case PredicateSpec::Kind::kThreshold:
      break;
    case PredicateSpec::Kind::kDictionary:
      dictionary = LexiconFromFile(opts.dict);
      break;
    case PredicateSpec::Kind::kOracle: {
      RequireReadable(opts.gold, "gold file");
      std::vector<int> lines;
      gold = ReadSegmentedCorpus(opts.gold, &lines);
      std::vector<Segmentation> unsegmented;
      for (const Sentence& s : sentences) {
        if (!s.empty()) unsegmented.emplace_back(s, std::vector<int>{});
      }
      CheckAligned(unsegmented, gold, lines);
      break;
    }
    case PredicateSpec::Kind::kLearned: {
      RequireReadable(predicate.path, "pruner model");
      pruner = PruneModel::Load(predicate.path, &resources);
      std::vector<Sentence> text = resources.frequency_text;
      if (!opts.exclude_test_counts) {
        text.insert(text.end(), sentences.begin(), sentences.end());
      }
      counts = std::make_unique<StringFrequency>(text);
      // The whole batch is indexed before any prediction.
      for (const auto& s : batch.scores) {
        if (!s.sentence.empty()) tree_index.AddTree(SegTree::Build(s));
      }
      break;
    }
  }

  std::vector<std::string> lines(sentences.size());
  std::vector<size_t> gold_index(sentences.size(), 0);
  for (size_t k = 0, g = 0; k < sentences.size(); ++k) {
    if (!sentences[k].empty()) gold_index[k] = g++;
  }
  const FeatureSources sources{&resources.lexicon, &tree_index, counts.get()};
  ParallelFor(sentences.size(), common.jobs, [&](size_t k) {
    if (sentences[k].empty()) return;
    PrunePredicate p;
    switch (predicate.kind) {
      case PredicateSpec::Kind::kThreshold:
        p = ThresholdPredicate(predicate.threshold);
        break;
      case PredicateSpec::Kind::kDictionary:
        p = DictionaryPredicate(dictionary);
        break;
      case PredicateSpec::Kind::kOracle:
        p = OraclePredicate(gold[gold_index[k]]);
        break;
      case PredicateSpec::Kind::kLearned:
        p = LearnedPredicate(pruner, sources, batch.marginals[k]);
        break;
    }
    lines[k] = Segment(batch.scores[k], p, strategy).ToLine();
  });

  std::string text;
  for (const std::string& line : lines) text += line + "\n";
  WriteText(opts.output, text);
  log.Info("segmented " + std::to_string(sentences.size()) + " lines");
  (void)out;
  return kExitOk;
}

struct AlignedFiles {
  std::vector<Segmentation> output;
  std::vector<Segmentation> gold;
  std::vector<int> gold_lines;
};

AlignedFiles ReadAligned(const EvalOptions& opts) {
  RequireReadable(opts.output, "output file");
  RequireReadable(opts.gold, "gold file");
  AlignedFiles files;
  files.output = ReadSegmentedCorpus(opts.output);
  files.gold = ReadSegmentedCorpus(opts.gold, &files.gold_lines);
  CheckAligned(files.output, files.gold, files.gold_lines);
  return files;
}

int CmdEval(const EvalOptions& opts, const ScoringOptions& scoring,
            const CommonOptions& common, std::ostream& out, const Log& log) {
  RequireWritable(opts.csv, "CSV output");
  const AlignedFiles files = ReadAligned(opts);
  const Lexicon lex = LexiconFromFile(opts.train);
  const Lexicon* lex_ptr = opts.train.empty() ? nullptr : &lex;
  const EvalReport report = Evaluate(files.output, files.gold, lex_ptr);
  out << RenderReport(report);

  std::vector<CsvRow> rows = {{opts.corpus_name, scoring.strategy,
                               opts.predicate_label, report, {}}};
  if (opts.oracle) {
    const Strategy strategy = StrategyFlag(scoring.strategy);
    const auto sentences = SentencesOf(files.gold);
    const ScoredBatch batch = ScoreBatch(scoring, sentences, common.jobs, log);
    const EvalReport oracle =
        OracleBound(batch.scores, files.gold, strategy, lex_ptr);
    out << "oracle (" << StrategyName(strategy) << ")\n" << RenderReport(oracle);
    rows.push_back({opts.corpus_name, scoring.strategy, "oracle", oracle, {}});
  }
  if (!opts.csv.empty()) WriteText(opts.csv, RenderCsv(rows));
  return kExitOk;
}

int CmdAnalyze(const EvalOptions& opts, const ScoringOptions& scoring,
               const CommonOptions& common, std::ostream& out,
               const Log& log) {
  RequireWritable(opts.csv, "CSV output");
  const AlignedFiles files = ReadAligned(opts);
  const Lexicon lex = LexiconFromFile(opts.train);
  const auto sentences = SentencesOf(files.gold);
  const ScoredBatch batch = ScoreBatch(scoring, sentences, common.jobs, log);

  std::vector<ErrorBreakdown> parts(files.gold.size());
  ParallelFor(files.gold.size(), common.jobs, [&](size_t k) {
    parts[k] = ClassifyErrors(batch.scores[k], files.output[k], files.gold[k],
                              lex);
  });
  ErrorBreakdown breakdown;
  for (const auto& part : parts) breakdown += part;
  const EvalReport report =
      Evaluate(files.output, files.gold, opts.train.empty() ? nullptr : &lex);

  out << RenderBreakdown(breakdown);
  out << "missed gold words " << report.gold_words - report.correct_words
      << " (gold " << report.gold_words << ", correct " << report.correct_words
      << ")\n";
  if (!opts.csv.empty()) {
    const std::vector<CsvRow> rows = {{opts.corpus_name, scoring.strategy,
                                       opts.predicate_label, report,
                                       breakdown}};
    WriteText(opts.csv, RenderCsv(rows));
  }
  return kExitOk;
}

void AddScoringOptions(CLI::App* cmd, ScoringOptions* opts) {
  cmd->add_option("--provider", opts->provider,
                  "boundary scores: pmi | tagger:<path> | external:<path>")
      ->capture_default_str();
  cmd->add_option("--scores", opts->scores,
                  "external score file (same as --provider external:<path>)");
  cmd->add_option("--pmi-corpus", opts->pmi_corpus,
                  "text for PMI statistics (default: the input itself)");
  cmd->add_option("--strategy", opts->strategy, "tdtp | butp")
      ->capture_default_str();
}

}  // namespace

ProviderSpec ParseProviderSpec(std::string_view spec) {
  if (spec == "pmi") return {ProviderSpec::Kind::kPmi, ""};
  const size_t colon = spec.find(':');
  if (colon != std::string_view::npos && colon + 1 < spec.size()) {
    const std::string_view kind = spec.substr(0, colon);
    const std::string path(spec.substr(colon + 1));
    if (kind == "tagger") return {ProviderSpec::Kind::kTagger, path};
    if (kind == "external") return {ProviderSpec::Kind::kExternal, path};
  }
  throw UsageError("bad provider '" + std::string(spec) +
                   "' (expected pmi, tagger:<path> or external:<path>)");
}

PredicateSpec ParsePredicateSpec(std::string_view spec) {
  PredicateSpec out;
  if (spec == "dict") {
    out.kind = PredicateSpec::Kind::kDictionary;
    return out;
  }
  if (spec == "oracle") {
    out.kind = PredicateSpec::Kind::kOracle;
    return out;
  }
  if (spec.starts_with("threshold:")) {
    const std::string_view value = spec.substr(10);
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), out.threshold);
    if (!value.empty() && ec == std::errc() &&
        ptr == value.data() + value.size()) {
      out.kind = PredicateSpec::Kind::kThreshold;
      return out;
    }
  }
  if (spec.starts_with("learned:") && spec.size() > 8) {
    out.kind = PredicateSpec::Kind::kLearned;
    out.path = std::string(spec.substr(8));
    return out;
  }
  throw UsageError("bad predicate '" + std::string(spec) +
                   "' (expected threshold:<t>, dict, oracle or "
                   "learned:<model-path>)");
}

void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min(n, static_cast<size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (size_t k = w; k < n; k += workers) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Binary-tree word segmentation: build, prune, evaluate", "segtree"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--jobs", common.jobs, "worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "train tagger and pruner");
  train_cmd->add_option("--input", train.input, "segmented training corpus")
      ->required();
  train_cmd->add_option("--tagger-out", train.tagger_out, "tagger model path")
      ->required();
  train_cmd->add_option("--pruner-out", train.pruner_out, "pruner model path")
      ->required();
  train_cmd->add_option("--split", train.split,
                        "fraction of sentences for the tagger")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.tagger.epochs)->capture_default_str();
  train_cmd->add_option("--rate", train.tagger.learning_rate)
      ->capture_default_str();
  train_cmd->add_option("--l2", train.tagger.l2)->capture_default_str();
  train_cmd->add_option("--batch", train.tagger.batch_size)
      ->capture_default_str();
  train_cmd->add_option("--pruner-epochs", train.pruner.epochs)
      ->capture_default_str();
  train_cmd->add_option("--pruner-rate", train.pruner.learning_rate)
      ->capture_default_str();
  train_cmd->add_option("--pruner-l2", train.pruner.l2)->capture_default_str();
  train_cmd->add_option("--samples-dump", train.samples_dump,
                        "write pruning samples for inspection");

  SegmentOptions segment;
  ScoringOptions segment_scoring;
  auto* segment_cmd = app.add_subcommand("segment", "segment raw text");
  segment_cmd->add_option("--input", segment.input, "raw input, one per line")
      ->required();
  segment_cmd->add_option("--output", segment.output, "segmented output")
      ->required();
  segment_cmd->add_option("--predicate", segment.predicate,
                          "threshold:<t> | dict | oracle | learned:<path>")
      ->capture_default_str();
  segment_cmd->add_option("--dict", segment.dict,
                          "segmented corpus supplying the dictionary");
  segment_cmd->add_option("--gold", segment.gold, "gold file for oracle");
  segment_cmd->add_option("--write-scores", segment.write_scores,
                          "also write the boundary scores used");
  segment_cmd->add_flag("--exclude-test-counts", segment.exclude_test_counts,
                        "do not count input text in association features");
  AddScoringOptions(segment_cmd, &segment_scoring);

  EvalOptions eval;
  ScoringOptions eval_scoring;
  auto* eval_cmd = app.add_subcommand("eval", "precision, recall and F");
  EvalOptions analyze;
  ScoringOptions analyze_scoring;
  auto* analyze_cmd = app.add_subcommand("analyze", "tree-based error breakdown");
  for (auto [cmd, opts, scoring] :
       {std::tuple{eval_cmd, &eval, &eval_scoring},
        std::tuple{analyze_cmd, &analyze, &analyze_scoring}}) {
    cmd->add_option("--output", opts->output, "segmented system output")
        ->required();
    cmd->add_option("--gold", opts->gold, "segmented gold standard")
        ->required();
    cmd->add_option("--train", opts->train,
                    "training corpus, for the IV/OOV lexicon");
    cmd->add_option("--csv", opts->csv, "write a CSV row");
    cmd->add_option("--corpus-name", opts->corpus_name, "CSV corpus label")
        ->capture_default_str();
    cmd->add_option("--predicate-label", opts->predicate_label,
                    "CSV predicate label");
    AddScoringOptions(cmd, scoring);
  }
  eval_cmd->add_flag("--oracle", eval.oracle, "also report oracle pruning");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "segtree: " << e.what() << "\n";
    return kExitUsage;
  }

  const Log log(err);
  try {
    if (*train_cmd) return CmdTrain(train, common, out, log);
    if (*segment_cmd) {
      return CmdSegment(segment, segment_scoring, common, out, log);
    }
    if (*eval_cmd) return CmdEval(eval, eval_scoring, common, out, log);
    if (*analyze_cmd) {
      return CmdAnalyze(analyze, analyze_scoring, common, out, log);
    }
  } catch (const UsageError& e) {
    err << "segtree: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "segtree: training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const FormatError& e) {
    err << "segtree: format error: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    err << "segtree: I/O error: " << e.what() << "\n";
    return kExitData;
  } catch (const ArgumentError& e) {
    err << "segtree: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace segtree::cli
