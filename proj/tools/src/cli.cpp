#include "webqa_cli/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"
#include "webqa/metrics.hpp"
#include "webqa/select.hpp"
#include "webqa/suggest.hpp"
#include "webqa/synth.hpp"
#include "webqa/webtree.hpp"
#include "webqa_cli/config.hpp"

namespace webqa::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractViolation("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContractViolation("cannot write " + path.string());
  out << text;
  if (!out) throw ContractViolation("failed writing " + path.string());
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ContractViolation("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Corpus load_corpus(const fs::path& path) { return corpus_from_json(read_text(path)); }

struct Label {
  std::string page_id;
  StringSet gold;
};

std::vector<Label> load_labels(const fs::path& path) {
  const json j = parse_json_file(path);
  std::vector<Label> out;
  try {
    for (const auto& e : j.at("examples")) {
      out.push_back({e.at("page_id").get<std::string>(), StringSet(e.at("gold").get<std::vector<std::string>>())});
    }
  } catch (const json::exception& e) {
    throw ContractViolation("labels file " + path.string() + " must look like {\"examples\":[{\"page_id\",\"gold\"}]}: " +
                            e.what());
  }
  return out;
}

// Page ids either as a labels file or as a plain JSON array.
std::vector<std::string> load_page_ids(const fs::path& path) {
  const json j = parse_json_file(path);
  if (j.is_array()) {
    try {
      return j.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ContractViolation("page id list " + path.string() + " must hold strings: " + e.what());
    }
  }
  std::vector<std::string> ids;
  for (const auto& l : load_labels(path)) ids.push_back(l.page_id);
  return ids;
}

std::vector<std::string> load_keywords(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    const std::string k = collapse_whitespace(line);
    if (!k.empty()) out.push_back(k);
  }
  return out;
}

ExampleSet build_examples(const Corpus& corpus, const std::vector<Label>& labels, std::string question,
                          std::vector<std::string> keywords) {
  ExampleSet examples;
  examples.question = std::move(question);
  examples.keywords = std::move(keywords);
  for (const auto& l : labels) examples.examples.push_back(make_example(l.page_id, corpus.at(l.page_id), l.gold));
  return examples;
}

std::vector<PagePtr> all_pages(const Corpus& corpus) {
  std::vector<PagePtr> pages;
  for (std::size_t i = 0; i < corpus.size(); ++i) pages.push_back(corpus.page(i));
  return pages;
}

std::string stats_json(const SynthStats& s) {
  const json j{{"locator_expansions", s.locator_expansions},
               {"extractor_expansions", s.extractor_expansions},
               {"expansions", s.expansions()},
               {"pruned_locators", s.pruned_locators},
               {"pruned_extractors", s.pruned_extractors},
               {"skipped_guards", s.skipped_guards},
               {"extractor_memo_hits", s.extractor_memo_hits},
               {"branch_memo_hits", s.branch_memo_hits},
               {"passes", s.passes},
               {"partitions", s.partitions}};
  return j.dump(2) + "\n";
}

// Options shared by synthesize and oracle.
struct SynthArgs {
  std::string corpus, labels, question, keywords, config, out, stats;
  bool no_prune = false, no_decomp = false, kw_only = false, nl_only = false;
};

void add_synth_options(CLI::App& cmd, SynthArgs& a) {
  cmd.add_option("--corpus", a.corpus, "Corpus JSON from ingest")->required();
  cmd.add_option("--labels", a.labels, "Labels JSON")->required();
  cmd.add_option("--question", a.question, "Natural-language question")->required();
  cmd.add_option("--keywords", a.keywords, "Keyword file, one per line")->required();
  cmd.add_option("--config", a.config, "Run configuration JSON");
  cmd.add_option("--out", a.out, "Where to write the optimal program set")->required();
  cmd.add_option("--stats", a.stats, "Where to write search statistics");
  cmd.add_flag("--no-prune", a.no_prune, "Disable upper-bound pruning");
  cmd.add_flag("--no-decomp", a.no_decomp, "Search guards and extractors jointly");
  cmd.add_flag("--kw-only", a.kw_only, "Keyword atoms only, no question answering");
  cmd.add_flag("--nl-only", a.nl_only, "Question answering only, no keyword atoms");
}

RunConfig config_from(const std::string& path) {
  return load_config(path.empty() ? std::nullopt : std::optional<fs::path>(path));
}

int cmd_synthesize(const SynthArgs& a, bool oracle, std::ostream& out) {
  RunConfig cfg = config_from(a.config);
  cfg.synth.no_prune = cfg.synth.no_prune || a.no_prune;
  cfg.synth.no_decomp = cfg.synth.no_decomp || a.no_decomp;
  cfg.kw_only = cfg.kw_only || a.kw_only;
  cfg.nl_only = cfg.nl_only || a.nl_only;
  finalize_grammar(cfg);
  const Corpus corpus = load_corpus(a.corpus);
  const ExampleSet examples = build_examples(corpus, load_labels(a.labels), a.question, load_keywords(a.keywords));
  const ProviderPtr provider = make_provider(cfg.provider);

  const auto start = std::chrono::steady_clock::now();
  const OptimalSet optimal = oracle ? brute_force_synthesize(examples, *provider, cfg.synth)
                                    : synthesize(examples, *provider, cfg.synth);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_text(a.out, optimal.to_json());
  if (!a.stats.empty()) write_text(a.stats, stats_json(optimal.stats()));
  out << (oracle ? "oracle" : "synthesize") << ": " << optimal.count() << " optimal programs at F1 "
      << optimal.f1().value() << " (" << optimal.f1().num << "/" << optimal.f1().den << ") over "
      << examples.size() << " examples, " << optimal.stats().expansions() << " expansions, " << seconds << " s\n";
  return kExitOk;
}

struct SelectArgs {
  std::string programs, corpus, config, out, report, method = "consensus";
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
};

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const RunConfig cfg = config_from(a.config);
  const OptimalSet optimal = OptimalSet::from_json(read_text(a.programs));
  if (optimal.empty()) throw ContractViolation("the program file holds no programs");
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  dsl::Program chosen;
  if (a.method == "consensus") {
    if (a.corpus.empty()) throw ContractViolation("consensus selection needs --corpus");
    const Corpus corpus = load_corpus(a.corpus);
    const ProviderPtr provider = make_provider(cfg.provider);
    const Selection sel = select_program(optimal, all_pages(corpus), a.n.value_or(cfg.ensemble_size), seed, *provider);
    chosen = sel.chosen;
    if (!a.report.empty()) write_text(a.report, sel.report_json());
    out << "select: " << sel.candidates.size() << " distinct candidates, chosen loss " << sel.loss << ", size "
        << chosen.size() << "\n";
  } else if (a.method == "random") {
    chosen = select_random(optimal, seed);
    out << "select: random draw, size " << chosen.size() << "\n";
  } else if (a.method == "shortest") {
    chosen = select_shortest(optimal, seed);
    out << "select: shortest, size " << chosen.size() << "\n";
  } else {
    throw ContractViolation("unknown selection method '" + a.method + "'");
  }
  write_text(a.out, dsl::program_to_json(chosen) + "\n");
  return kExitOk;
}

std::string extraction_json(const dsl::Program& program, const Corpus& corpus, const PredicateProvider& provider) {
  json results = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    results.push_back({{"page_id", corpus.id(i)}, {"strings", dsl::eval_program(program, *corpus.page(i), provider).items()}});
  }
  return json{{"results", results}}.dump(2) + "\n";
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ProviderError*>(&error)) return kExitProvider;
  if (dynamic_cast<const CapExceeded*>(&error)) return kExitCap;
  return kExitContract;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize, select and run web question-answering extraction programs"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::string html_dir, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Parse a directory of HTML files into a corpus");
  ingest->add_option("--html-dir", html_dir, "Directory of .html files")->required();
  ingest->add_option("--out", ingest_out, "Corpus JSON to write")->required();
  ingest->callback([&] {
    action = [&] {
      if (!fs::is_directory(html_dir)) throw ContractViolation("not a directory: " + html_dir);
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(html_dir)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".html" || ext == ".htm")) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      Corpus corpus;
      for (const auto& f : files) {
        corpus.add(f.stem().string(), std::make_shared<const Webpage>(parse_html(read_text(f), f.filename().string())));
      }
      write_text(ingest_out, corpus_to_json(corpus));
      out << "ingest: " << corpus.size() << " pages\n";
      return kExitOk;
    };
  });

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synthesize", "Find every program with optimal F1 on the labels");
  add_synth_options(*synth, synth_args);
  synth->callback([&] { action = [&] { return cmd_synthesize(synth_args, false, out); }; });

  SynthArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive reference synthesis for small grammars");
  add_synth_options(*oracle, oracle_args);
  oracle->callback([&] { action = [&] { return cmd_synthesize(oracle_args, true, out); }; });

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "Pick one program from an optimal set");
  select->add_option("--programs", select_args.programs, "Optimal set from synthesize")->required();
  select->add_option("--corpus", select_args.corpus, "Unlabeled corpus for consensus selection");
  select->add_option("--n", select_args.n, "Ensemble size");
  select->add_option("--seed", select_args.seed, "Random seed");
  select->add_option("--method", select_args.method, "consensus, random or shortest")
      ->check(CLI::IsMember({"consensus", "random", "shortest"}));
  select->add_option("--config", select_args.config, "Run configuration JSON");
  select->add_option("--out", select_args.out, "Chosen program file")->required();
  select->add_option("--report", select_args.report, "Per-candidate losses");
  select->callback([&] { action = [&] { return cmd_select(select_args, out); }; });

  std::string extract_program, extract_corpus, extract_config, extract_out;
  auto* extract = app.add_subcommand("extract", "Run a program over every page of a corpus");
  extract->add_option("--program", extract_program, "Program file")->required();
  extract->add_option("--corpus", extract_corpus, "Corpus JSON")->required();
  extract->add_option("--config", extract_config, "Run configuration JSON");
  extract->add_option("--out", extract_out, "Results JSON")->required();
  extract->callback([&] {
    action = [&] {
      const RunConfig cfg = config_from(extract_config);
      const dsl::Program program = dsl::parse_program(read_text(extract_program));
      const Corpus corpus = load_corpus(extract_corpus);
      write_text(extract_out, extraction_json(program, corpus, *make_provider(cfg.provider)));
      out << "extract: " << corpus.size() << " pages\n";
      return kExitOk;
    };
  });

  std::string eval_program_path, eval_corpus, eval_labels, eval_config, eval_out;
  auto* eval = app.add_subcommand("eval", "Score a program against labeled pages");
  eval->add_option("--program", eval_program_path, "Program file")->required();
  eval->add_option("--corpus", eval_corpus, "Corpus JSON")->required();
  eval->add_option("--labels", eval_labels, "Labels JSON")->required();
  eval->add_option("--config", eval_config, "Run configuration JSON");
  eval->add_option("--out", eval_out, "Evaluation report JSON");
  eval->callback([&] {
    action = [&] {
      const RunConfig cfg = config_from(eval_config);
      const dsl::Program program = dsl::parse_program(read_text(eval_program_path));
      const Corpus corpus = load_corpus(eval_corpus);
      const ExampleSet examples = build_examples(corpus, load_labels(eval_labels), program.question, program.keywords);
      const ProgramScore score = f1_program(program, examples, *make_provider(cfg.provider));
      if (!eval_out.empty()) write_text(eval_out, evaluation_report_json(examples, score));
      out << "eval: precision " << score.scores.precision << " recall " << score.scores.recall << " F1 "
          << score.scores.f1 << " over " << examples.size() << " pages\n";
      return kExitOk;
    };
  });

  std::string suggest_corpus, suggest_labeled, suggest_question, suggest_keywords, suggest_config, suggest_out;
  std::size_t budget = 5;
  std::optional<std::uint64_t> suggest_seed;
  auto* suggest = app.add_subcommand("suggest", "Propose pages worth labeling next");
  suggest->add_option("--corpus", suggest_corpus, "Corpus JSON")->required();
  suggest->add_option("--labeled", suggest_labeled, "Labels JSON or JSON array of page ids");
  suggest->add_option("--budget", budget, "Number of pages to propose");
  suggest->add_option("--seed", suggest_seed, "Random seed");
  suggest->add_option("--question", suggest_question, "Natural-language question");
  suggest->add_option("--keywords", suggest_keywords, "Keyword file, one per line");
  suggest->add_option("--config", suggest_config, "Run configuration JSON");
  suggest->add_option("--out", suggest_out, "Suggestions JSON");
  suggest->callback([&] {
    action = [&] {
      RunConfig cfg = config_from(suggest_config);
      if (suggest_seed) cfg.suggest.seed = *suggest_seed;
      const Corpus corpus = load_corpus(suggest_corpus);
      const std::vector<std::string> labeled =
          suggest_labeled.empty() ? std::vector<std::string>{} : load_page_ids(suggest_labeled);
      const QueryContext query{suggest_question,
                               suggest_keywords.empty() ? std::vector<std::string>{} : load_keywords(suggest_keywords)};
      const auto ids = suggest_labels(corpus, labeled, budget, query, *make_provider(cfg.provider), cfg.suggest);
      if (!suggest_out.empty()) write_text(suggest_out, json{{"suggestions", ids}}.dump(2) + "\n");
      out << "suggest:";
      for (const auto& id : ids) out << " " << id;
      out << "\n";
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitContract;
  }
  try {
    return action ? action() : kExitContract;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace webqa::cli
