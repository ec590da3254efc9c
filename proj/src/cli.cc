// Copyright 2026 The Relabel Authors.
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

#include "relabel/cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relabel/active_loop.h"
#include "relabel/corpus.h"
#include "relabel/distill.h"
#include "relabel/http_service.h"
#include "relabel/metrics.h"
#include "relabel/model.h"
#include "relabel/noise_lab.h"
#include "relabel/records.h"
#include "relabel/review_store.h"
#include "relabel/synth.h"
#include "relabel/trainer.h"

namespace relabel {
namespace {

namespace fs = std::filesystem;

// Raised for option combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string data_dir = "relabel-data";
  std::vector<std::string> types = {"PER", "PROD", "ORG", "GPE"};
  std::uint64_t seed = 0;

  DataPaths paths() const { return DataPaths{data_dir}; }
  TagSet tag_set() const { return TagSet(types); }
  // `path`, or the data-directory default when empty.
  std::string or_default(const std::string& path,
                         const std::string& fallback) const {
    return path.empty() ? fallback : path;
  }
};

struct TrainOpts {
  TrainConfig config;
  std::string capacity = "teacher";
};

struct FlagOpts {
  double threshold = 2.0;
  int folds = 5;
  std::vector<std::string> focus = {"ORG"};
  double budget = 0.0;
  std::string gap_mode = "log";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--data-dir", c.data_dir, "Data directory")
      ->envname("RELABEL_DATA_DIR")
      ->capture_default_str();
  sub->add_option("--types", c.types, "Entity types, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

void add_train(CLI::App* sub, TrainOpts& t, bool with_capacity = true) {
  sub->add_option("--epochs", t.config.epochs)->capture_default_str();
  sub->add_option("--batch-size", t.config.batch_size)->capture_default_str();
  sub->add_option("--learning-rate", t.config.learning_rate)
      ->capture_default_str();
  sub->add_option("--l2", t.config.l2)->capture_default_str();
  sub->add_option("--max-length", t.config.max_sequence_length)
      ->capture_default_str();
  if (with_capacity) {
    sub->add_option("--capacity", t.capacity)
        ->check(CLI::IsMember({"teacher", "student"}))
        ->capture_default_str();
  }
}

void add_flag(CLI::App* sub, FlagOpts& f) {
  sub->add_option("--threshold", f.threshold, "Gap threshold T")
      ->capture_default_str();
  sub->add_option("--folds", f.folds, "Number of folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  sub->add_option("--focus", f.focus,
                  "Entity types that may be flagged, comma separated; 'all' "
                  "for every type")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--budget", f.budget,
                  "Maximum flagged fraction of the training set (0 = none)")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--gap-mode", f.gap_mode)
      ->check(CLI::IsMember({"log", "prob"}))
      ->capture_default_str();
}

FlagConfig flag_config(const FlagOpts& f) {
  FlagConfig cfg;
  cfg.threshold = f.threshold;
  cfg.focus_types.clear();
  for (const auto& t : f.focus) {
    if (t == "all") {
      cfg.focus_types.clear();
      break;
    }
    if (!t.empty()) cfg.focus_types.insert(t);
  }
  if (f.budget > 0.0) cfg.budget = f.budget;
  cfg.mode = f.gap_mode == "prob" ? GapMode::kProbability : GapMode::kLogMarginal;
  cfg.validate();
  return cfg;
}

TrainConfig train_config(const TrainOpts& t, std::uint64_t seed) {
  TrainConfig cfg = t.config;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void check_types(const FlagConfig& cfg, const TagSet& ts) {
  for (const auto& t : cfg.focus_types) {
    if (!ts.find_type(t)) throw UsageError("unknown focus type '" + t + "'");
  }
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

void ensure_parent(const std::string& path) {
  ensure_dir(fs::path(path).parent_path().string());
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed to write " + path);
}

ModelWeights load_model(const std::string& path, const TagSet& ts) {
  ModelWeights m = ModelWeights::load_file(path);
  if (m.tag_set().entity_types() != ts.entity_types()) {
    throw std::runtime_error(path + ": model entity types differ from --types");
  }
  return m;
}

// ---- subcommands ------------------------------------------------------------

struct SynthOpts {
  std::size_t utterances = 2000;
  std::string out;
  std::string split = "train";
  std::string id_prefix = "s";
  double lowercase_prob = 0.3;
  double filler_prob = 0.3;
};

int run_synth(const Common& c, const SynthOpts& s, std::ostream& out) {
  SynthConfig cfg;
  cfg.utterances = s.utterances;
  cfg.seed = c.seed;
  cfg.id_prefix = s.id_prefix;
  cfg.lowercase_prob = s.lowercase_prob;
  cfg.filler_prob = s.filler_prob;
  cfg.split = s.split == "unlabeled" ? Split::kUnlabeled : Split::kTrain;
  const Corpus corpus = generate_corpus(cfg);
  ensure_parent(s.out);
  write_conll_file(corpus, s.out);
  out << "wrote " << corpus.size() << " utterances to " << s.out << '\n';
  return kExitOk;
}

int run_ingest(const Common& c, const std::string& input, bool strict,
               std::ostream& out) {
  const TagSet ts = c.tag_set();
  ParseOptions opts;
  opts.mode = strict ? BioMode::kStrict : BioMode::kRepair;
  const Corpus corpus = read_conll_file(input, ts, opts);
  const DataPaths p = c.paths();
  ensure_dir(p.dir);
  write_conll_file(corpus, p.train());
  Json meta{{"types", c.types},
            {"utterances", corpus.size()},
            {"source_path", input}};
  write_text(p.meta(), meta.dump(2) + "\n");
  out << "ingested " << corpus.size() << " utterances into " << p.train()
      << '\n';
  return kExitOk;
}

int run_folds(const Common& c, int k, std::ostream& out) {
  const DataPaths p = c.paths();
  const Corpus corpus = read_conll_file(p.train(), c.tag_set());
  const FoldPlan plan = make_folds(corpus, k, c.seed);
  write_fold_plan(plan, p.folds());
  out << "fold sizes:";
  for (auto n : plan.fold_sizes()) out << ' ' << n;
  out << '\n';
  return kExitOk;
}

int run_flag(const Common& c, const FlagOpts& f, const TrainOpts& t,
             std::ostream& out) {
  const DataPaths p = c.paths();
  const TagSet ts = c.tag_set();
  const Corpus corpus = read_conll_file(p.train(), ts);

  LoopConfig cfg;
  cfg.folds = f.folds;
  cfg.fold_seed = c.seed;
  cfg.train = train_config(t, c.seed);
  cfg.capacity = parse_capacity(t.capacity);
  cfg.flag = flag_config(f);
  check_types(cfg.flag, ts);

  const LoopResult result = run_active_loop(corpus, cfg);

  std::map<std::string, std::vector<GapRecord>> evidence;
  for (const auto& r : result.gaps) {
    if (flaggable(r, cfg.flag)) evidence[r.utterance_id].push_back(r);
  }
  std::vector<GapRecord> queue;
  for (const auto& id : result.selected) {
    for (const auto& r : evidence[id]) queue.push_back(r);
  }
  write_fold_plan(result.plan, p.folds());
  write_gap_records(result.gaps, p.gaps(), ts);
  write_gap_records(queue, p.queue(), ts);
  out << "flagged " << result.selected.size() << " of " << corpus.size()
      << " utterances; queue written to " << p.queue() << '\n';
  return kExitOk;
}

int run_serve(const Common& c, const std::string& host, int port,
              const std::string& static_dir, std::ostream& out) {
  const DataPaths p = c.paths();
  auto store = ReviewStore::open(p, c.tag_set());
  ServiceOptions opts;
  opts.host = host;
  opts.port = port;
  opts.static_dir = static_dir;
  opts.paths = p;
  ReviewService service(*store, opts);
  const int bound = service.bind();
  if (bound < 0) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  out << "serving " << store->snapshot()->items.size() << " items on http://"
      << host << ':' << bound << '\n'
      << std::flush;
  return service.serve() ? kExitOk : kExitData;
}

int run_merge(const Common& c, const std::string& output, std::ostream& out) {
  const DataPaths p = c.paths();
  const std::string dest = c.or_default(output, p.merged());
  ensure_parent(dest);
  const auto s = merge_files(p.train(), p.decisions(), dest, c.tag_set());
  out << "merged " << s.decisions << " decisions (" << s.corrected
      << " corrected utterances) into " << dest << '\n';
  return kExitOk;
}

int run_train(const Common& c, const TrainOpts& t, const std::string& input,
              const std::string& init, const std::string& model_out,
              std::ostream& out) {
  const DataPaths p = c.paths();
  const TagSet ts = c.tag_set();
  const Corpus corpus = read_conll_file(c.or_default(input, p.train()), ts);
  const Capacity cap = parse_capacity(t.capacity);
  std::optional<ModelWeights> start;
  if (!init.empty()) start = load_model(init, ts);
  auto result = train(corpus, train_config(t, c.seed), cap,
                      start ? &*start : nullptr);
  const std::string dest =
      c.or_default(model_out, p.dir + "/" + t.capacity + ".model");
  ensure_parent(dest);
  result.weights.save_file(dest);
  out << "trained " << t.capacity << " on " << corpus.size()
      << " utterances; final loss "
      << (result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back())
      << "; model " << result.weights.fingerprint() << " written to " << dest
      << '\n';
  return kExitOk;
}

struct DistillOpts {
  std::string teacher;
  std::string unlabeled;
  std::string gold;
  double floor = kDefaultConfidenceFloor;
  std::string model_out;
  std::string pseudo_out;
};

int run_distill(const Common& c, const DistillOpts& d, const TrainOpts& t,
                std::ostream& out) {
  const DataPaths p = c.paths();
  const TagSet ts = c.tag_set();
  const ModelWeights teacher = load_model(d.teacher, ts);
  ParseOptions unl;
  unl.split = Split::kUnlabeled;
  const Corpus pool = read_conll_file(d.unlabeled, ts, unl);
  const Corpus gold = read_conll_file(c.or_default(d.gold, p.train()), ts);

  const PseudoLabeledSet pseudo = pseudo_label(teacher, pool, d.floor);
  if (!d.pseudo_out.empty()) {
    ensure_parent(d.pseudo_out);
    save_pseudo_labeled(pseudo, d.pseudo_out, d.pseudo_out + ".json");
  }
  const auto result = two_stage_train(pseudo, gold, train_config(t, c.seed));
  const std::string dest = c.or_default(d.model_out, p.dir + "/student.model");
  ensure_parent(dest);
  result.student.save_file(dest);
  out << "pseudo-labelled " << pseudo.corpus.size() << " of " << pool.size()
      << " utterances (floor " << d.floor << "); student "
      << result.student.fingerprint() << " written to " << dest << '\n';
  return kExitOk;
}

struct EvalOpts {
  std::string model;
  std::string input;
  std::string pred;
  std::string gold;
  std::string report_out;
};

int run_eval(const Common& c, const EvalOpts& e, std::ostream& out) {
  const TagSet ts = c.tag_set();
  EvalReport report;
  if (!e.model.empty()) {
    if (e.input.empty()) throw UsageError("--model needs --input");
    const ModelWeights m = load_model(e.model, ts);
    const Corpus gold = read_conll_file(e.input, ts);
    report = entity_f1(predict_corpus(m, gold), gold);
  } else {
    if (e.pred.empty() || e.gold.empty()) {
      throw UsageError("give --model and --input, or --pred and --gold");
    }
    report = entity_f1(read_conll_file(e.pred, ts), read_conll_file(e.gold, ts));
  }
  const std::string text = format_report(report);
  if (!e.report_out.empty()) write_text(e.report_out, text);
  out << text;
  return kExitOk;
}

struct CorruptOpts {
  std::string input;
  std::string output;
  std::string ledger;
  double rate = 0.1;
  double drop_prob = 0.0;
};

int run_corrupt(const Common& c, const CorruptOpts& o, std::ostream& out) {
  const DataPaths p = c.paths();
  const TagSet ts = c.tag_set();
  const Corpus clean = read_conll_file(c.or_default(o.input, p.train()), ts);
  NoiseSpec spec;
  spec.rate = o.rate;
  spec.drop_prob = o.drop_prob;
  spec.seed = c.seed;
  const NoisyCorpus noisy = inject_noise(clean, spec);
  const std::string dest = c.or_default(o.output, p.dir + "/corrupted.conll");
  const std::string ledger = c.or_default(o.ledger, p.dir + "/ledger.jsonl");
  ensure_parent(dest);
  ensure_parent(ledger);
  write_conll_file(noisy.corpus, dest);
  write_ledger(noisy.ledger, ledger, ts);
  out << "corrupted " << noisy.ledger.size() << " of " << clean.size()
      << " utterances; corpus " << dest << ", ledger " << ledger << '\n';
  return kExitOk;
}

struct RecoverOpts {
  std::string input;
  std::string eval;
  double rate = 0.1;
  std::string report_out;
};

int run_recover(const Common& c, const RecoverOpts& r, const FlagOpts& f,
                const TrainOpts& t, std::ostream& out) {
  const DataPaths p = c.paths();
  const TagSet ts = c.tag_set();
  const Corpus clean = read_conll_file(c.or_default(r.input, p.train()), ts);
  const Corpus eval_set = read_conll_file(r.eval, ts);

  RecoveryConfig cfg;
  cfg.noise.rate = r.rate;
  cfg.noise.seed = c.seed;
  cfg.loop.folds = f.folds;
  cfg.loop.fold_seed = c.seed;
  cfg.loop.train = train_config(t, c.seed);
  cfg.loop.flag = flag_config(f);
  check_types(cfg.loop.flag, ts);
  cfg.student_train = cfg.loop.train;

  const RecoveryReport report = f1_recovery_experiment(clean, cfg, eval_set);
  if (!r.report_out.empty()) {
    write_text(r.report_out, to_json(report).dump(2) + "\n");
  }
  out << format_recovery_table(report);
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"Label-noise detection and re-annotation toolkit", "relabel"};
  app.require_subcommand(1);

  Common common;
  TrainOpts train_opts;
  FlagOpts flag_opts;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  SynthOpts synth_opts;
  add_common(synth, common);
  synth->add_option("--utterances", synth_opts.utterances)->capture_default_str();
  synth->add_option("--out", synth_opts.out, "Output CoNLL file")->required();
  synth->add_option("--split", synth_opts.split)
      ->check(CLI::IsMember({"train", "unlabeled"}))
      ->capture_default_str();
  synth->add_option("--id-prefix", synth_opts.id_prefix)->capture_default_str();
  synth->add_option("--lowercase-prob", synth_opts.lowercase_prob)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth->add_option("--filler-prob", synth_opts.filler_prob)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Load a CoNLL file into the store");
  std::string ingest_input;
  bool ingest_strict = false;
  add_common(ingest, common);
  ingest->add_option("input", ingest_input, "CoNLL file")->required();
  ingest->add_flag("--strict", ingest_strict,
                   "Reject BIO violations instead of repairing them");

  auto* folds = app.add_subcommand("folds", "Partition the training set");
  int fold_count = 5;
  add_common(folds, common);
  folds->add_option("--folds", fold_count)
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();

  auto* flag = app.add_subcommand("flag", "Run the fold loop and write the queue");
  add_common(flag, common);
  add_flag(flag, flag_opts);
  add_train(flag, train_opts);

  auto* serve = app.add_subcommand("serve", "Start the HTTP review service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  add_common(serve, common);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Directory of UI assets");

  auto* merge = app.add_subcommand("merge", "Apply logged decisions");
  std::string merge_output;
  add_common(merge, common);
  merge->add_option("--output", merge_output,
                    "Output CoNLL file (default <data-dir>/reannotated.conll)");

  auto* trn = app.add_subcommand("train", "Train a tagger");
  std::string train_input;
  std::string train_init;
  std::string train_out;
  add_common(trn, common);
  add_train(trn, train_opts);
  trn->add_option("--input", train_input,
                  "Training CoNLL file (default <data-dir>/train.conll)");
  trn->add_option("--init", train_init, "Model to continue from");
  trn->add_option("--model-out", train_out,
                  "Model file (default <data-dir>/<capacity>.model)");

  auto* distill = app.add_subcommand("distill", "Pseudo-label and train a student");
  DistillOpts distill_opts;
  TrainOpts distill_train;
  add_common(distill, common);
  add_train(distill, distill_train, false);
  distill->add_option("--teacher", distill_opts.teacher)->required();
  distill->add_option("--unlabeled", distill_opts.unlabeled)->required();
  distill->add_option("--gold", distill_opts.gold,
                      "Gold CoNLL file (default <data-dir>/train.conll)");
  distill->add_option("--confidence-floor", distill_opts.floor)
      ->capture_default_str();
  distill->add_option("--model-out", distill_opts.model_out);
  distill->add_option("--pseudo-out", distill_opts.pseudo_out,
                      "Also write the pseudo-labelled set (plus a .json sidecar)");

  auto* eval = app.add_subcommand("eval", "Entity-level P/R/F1 report");
  EvalOpts eval_opts;
  add_common(eval, common);
  eval->add_option("--model", eval_opts.model);
  eval->add_option("--input", eval_opts.input, "Gold CoNLL file for --model");
  eval->add_option("--pred", eval_opts.pred);
  eval->add_option("--gold", eval_opts.gold);
  eval->add_option("--report-out", eval_opts.report_out);

  auto* corrupt = app.add_subcommand("corrupt", "Inject ledgered label noise");
  CorruptOpts corrupt_opts;
  add_common(corrupt, common);
  corrupt->add_option("--input", corrupt_opts.input);
  corrupt->add_option("--output", corrupt_opts.output);
  corrupt->add_option("--ledger", corrupt_opts.ledger);
  corrupt->add_option("--rate", corrupt_opts.rate)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  corrupt->add_option("--drop-prob", corrupt_opts.drop_prob)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* recover = app.add_subcommand("recover", "Noise-recovery experiment");
  RecoverOpts recover_opts;
  add_common(recover, common);
  add_flag(recover, flag_opts);
  add_train(recover, train_opts, false);
  recover->add_option("--input", recover_opts.input);
  recover->add_option("--eval", recover_opts.eval, "Held-out CoNLL file")
      ->required();
  recover->add_option("--rate", recover_opts.rate)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  recover->add_option("--report-out", recover_opts.report_out, "JSON report");

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) {
      known = known || sub->get_name() == argv[1];
    }
    if (!known) {
      err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*synth) return run_synth(common, synth_opts, out);
    if (*ingest) return run_ingest(common, ingest_input, ingest_strict, out);
    if (*folds) return run_folds(common, fold_count, out);
    if (*flag) return run_flag(common, flag_opts, train_opts, out);
    if (*serve) return run_serve(common, host, port, static_dir, out);
    if (*merge) return run_merge(common, merge_output, out);
    if (*trn) return run_train(common, train_opts, train_input, train_init,
                               train_out, out);
    if (*distill) return run_distill(common, distill_opts, distill_train, out);
    if (*eval) return run_eval(common, eval_opts, out);
    if (*corrupt) return run_corrupt(common, corrupt_opts, out);
    if (*recover) return run_recover(common, recover_opts, flag_opts,
                                     train_opts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace relabel
