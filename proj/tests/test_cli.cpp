#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "support.hpp"
#include "webqa/dsl.hpp"
#include "webqa/errors.hpp"
#include "webqa_cli/cli.hpp"
#include "webqa_cli/config.hpp"

namespace webqa {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("webqa_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "webqa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string fixture(const std::string& name) { return testing::fixture_path("motivating/" + name).string(); }

// Ingests the two labeled pages into dir/corpus.json and the held-out page into dir/held.json.
void ingest_fixture(const TempDir& dir) {
  fs::create_directories(dir / "html");
  fs::create_directories(dir / "held");
  fs::copy_file(fixture("page_a.html"), dir / "html/page_a.html");
  fs::copy_file(fixture("page_b.html"), dir / "html/page_b.html");
  fs::copy_file(fixture("heldout.html"), dir / "held/heldout.html");
  ASSERT_EQ(run_cli({"ingest", "--html-dir", (dir / "html").string(), "--out", (dir / "corpus.json").string()}).code, 0);
  ASSERT_EQ(run_cli({"ingest", "--html-dir", (dir / "held").string(), "--out", (dir / "held.json").string()}).code, 0);
}

TEST(Cli, IngestMatchesLibraryParse) {
  TempDir dir;
  ingest_fixture(dir);
  Corpus expected;
  for (const char* id : {"page_a", "page_b"}) {
    const std::string file = std::string(id) + ".html";
    expected.add(id, std::make_shared<const Webpage>(parse_html(testing::read_file(fixture(file)), file)));
  }
  EXPECT_EQ(testing::read_file(dir / "corpus.json"), corpus_to_json(expected));
  const Corpus back = corpus_from_json(testing::read_file(dir / "corpus.json"));
  EXPECT_EQ(back.ids(), (std::vector<std::string>{"page_a", "page_b"}));
}

TEST(Cli, IngestEmptyDirectoryGivesEmptyCorpus) {
  TempDir dir;
  fs::create_directories(dir / "none");
  const Outcome r = run_cli({"ingest", "--html-dir", (dir / "none").string(), "--out", (dir / "c.json").string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(corpus_from_json(testing::read_file(dir / "c.json")).size(), 0u);
}

TEST(Cli, ExtractMatchesEvalProgram) {
  TempDir dir;
  ingest_fixture(dir);
  const Outcome r = run_cli({"extract", "--program", fixture("program.json"), "--corpus",
                             (dir / "corpus.json").string(), "--config", fixture("config.json"), "--out",
                             (dir / "ext.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json got = json::parse(testing::read_file(dir / "ext.json"));
  const dsl::Program program = dsl::parse_program(testing::read_file(fixture("program.json")));
  const auto provider = testing::fixture_provider();
  const Corpus corpus = corpus_from_json(testing::read_file(dir / "corpus.json"));
  ASSERT_EQ(got.at("results").size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& row = got["results"][i];
    EXPECT_EQ(row.at("page_id"), corpus.id(i));
    EXPECT_EQ(StringSet(row.at("strings").get<std::vector<std::string>>()),
              dsl::eval_program(program, *corpus.page(i), *provider));
  }
}

TEST(Cli, EvalReportMatchesLibrary) {
  TempDir dir;
  ingest_fixture(dir);
  const Outcome r = run_cli({"eval", "--program", fixture("program.json"), "--corpus", (dir / "corpus.json").string(),
                             "--labels", fixture("labels.json"), "--config", fixture("config.json"), "--out",
                             (dir / "eval.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const ExampleSet examples = testing::motivating_examples();
  const dsl::Program program = dsl::parse_program(testing::read_file(fixture("program.json")));
  const ProgramScore score = f1_program(program, examples, *testing::fixture_provider());
  EXPECT_EQ(testing::read_file(dir / "eval.json"), evaluation_report_json(examples, score));
}

TEST(Cli, PipelineReachesHeldOutGold) {
  TempDir dir;
  ingest_fixture(dir);
  const Outcome s = run_cli({"synthesize", "--corpus", (dir / "corpus.json").string(), "--labels",
                             fixture("labels.json"), "--question", testing::kQuestion, "--keywords",
                             fixture("keywords.txt"), "--config", fixture("config.json"), "--out",
                             (dir / "set.json").string(), "--stats", (dir / "stats.json").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  const OptimalSet set = OptimalSet::from_json(testing::read_file(dir / "set.json"));
  EXPECT_EQ(set.f1(), (Rational{1, 1}));
  EXPECT_TRUE(set.contains(dsl::parse_program(testing::read_file(fixture("program.json")))));
  EXPECT_GT(json::parse(testing::read_file(dir / "stats.json")).at("expansions").get<std::uint64_t>(), 0u);

  const Outcome sel = run_cli({"select", "--programs", (dir / "set.json").string(), "--corpus",
                               (dir / "held.json").string(), "--config", fixture("config.json"), "--out",
                               (dir / "prog.json").string(), "--report", (dir / "rep.json").string()});
  ASSERT_EQ(sel.code, 0) << sel.err;
  const dsl::Program chosen = dsl::parse_program(testing::read_file(dir / "prog.json"));
  EXPECT_EQ(dsl::eval_program(chosen, *testing::heldout_page(), *testing::fixture_provider()), testing::heldout_gold());
  EXPECT_TRUE(set.contains(chosen));
}

TEST(Cli, SelectMethodsAreDeterministic) {
  TempDir dir;
  ingest_fixture(dir);
  ASSERT_EQ(run_cli({"synthesize", "--corpus", (dir / "corpus.json").string(), "--labels", fixture("labels.json"),
                     "--question", testing::kQuestion, "--keywords", fixture("keywords.txt"), "--config",
                     fixture("config.json"), "--out", (dir / "set.json").string()})
                .code,
            0);
  for (const char* method : {"random", "shortest"}) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("p" + std::to_string(rep) + ".json");
      ASSERT_EQ(run_cli({"select", "--programs", (dir / "set.json").string(), "--method", method, "--seed", "3",
                         "--out", out.string()})
                    .code,
                0);
      if (rep == 0) first = testing::read_file(out);
      else EXPECT_EQ(testing::read_file(out), first) << method;
    }
  }
}

TEST(Cli, SuggestWritesIds) {
  TempDir dir;
  ingest_fixture(dir);
  write(dir / "labeled.json", R"(["page_a"])");
  auto suggest = [&](const std::string& budget) {
    const Outcome r = run_cli({"suggest", "--corpus", (dir / "corpus.json").string(), "--labeled",
                               (dir / "labeled.json").string(), "--budget", budget, "--config", fixture("config.json"),
                               "--out", (dir / "s.json").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(testing::read_file(dir / "s.json")).at("suggestions");
  };
  // Fewer unlabeled pages than the budget: all of them.
  EXPECT_EQ(suggest("2"), json::array({"page_b"}));
  // One cluster, already represented by the labeled page.
  EXPECT_EQ(suggest("1"), json::array());
}

TEST(CliExitCodes, UsageAndContractErrors) {
  TempDir dir;
  ingest_fixture(dir);
  EXPECT_EQ(run_cli({}).code, cli::kExitContract);
  EXPECT_EQ(run_cli({"bogus"}).code, cli::kExitContract);
  EXPECT_EQ(run_cli({"extract", "--corpus", (dir / "corpus.json").string()}).code, cli::kExitContract);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);

  write(dir / "bad_program.json", R"({"branches":[{"guard":{"op":"Nope","args":[]}}]})");
  EXPECT_EQ(run_cli({"extract", "--program", (dir / "bad_program.json").string(), "--corpus",
                     (dir / "corpus.json").string(), "--out", (dir / "x.json").string()})
                .code,
            cli::kExitContract);
  write(dir / "truncated.json", "{\"branches\": [");
  EXPECT_EQ(run_cli({"extract", "--program", (dir / "truncated.json").string(), "--corpus",
                     (dir / "corpus.json").string(), "--out", (dir / "x.json").string()})
                .code,
            cli::kExitContract);
  EXPECT_EQ(run_cli({"extract", "--program", fixture("program.json"), "--corpus", (dir / "missing.json").string(),
                     "--out", (dir / "x.json").string()})
                .code,
            cli::kExitContract);

  write(dir / "unknown_page.json", R"({"examples":[{"page_id":"nowhere","gold":["x"]}]})");
  EXPECT_EQ(run_cli({"eval", "--program", fixture("program.json"), "--corpus", (dir / "corpus.json").string(),
                     "--labels", (dir / "unknown_page.json").string()})
                .code,
            cli::kExitContract);
}

TEST(CliExitCodes, ConfigErrors) {
  TempDir dir;
  ingest_fixture(dir);
  auto synth_with = [&](const std::string& config, std::vector<std::string> extra = {}) {
    write(dir / "cfg.json", config);
    std::vector<std::string> args{"synthesize", "--corpus", (dir / "corpus.json").string(), "--labels",
                                  fixture("labels.json"), "--question", testing::kQuestion, "--keywords",
                                  fixture("keywords.txt"), "--config", (dir / "cfg.json").string(), "--out",
                                  (dir / "set.json").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args).code;
  };
  EXPECT_EQ(synth_with(R"({"grammar":{"depth":3}})"), cli::kExitContract);
  EXPECT_EQ(synth_with(R"({"provider":{"mode":"magic"}})"), cli::kExitContract);
  EXPECT_EQ(synth_with(R"({"grammar":{"threshold_step":0}})"), cli::kExitContract);
  EXPECT_EQ(synth_with(R"({"grammar":{"entity_labels":["GENE"]}})"), cli::kExitContract);
  EXPECT_EQ(synth_with("{}", {"--kw-only", "--nl-only"}), cli::kExitContract);
  EXPECT_EQ(synth_with(R"({"grammar":{"keyword_atoms":false,"answer_atoms":false,"entity_labels":[]}})"),
            cli::kExitContract);
  EXPECT_EQ(synth_with("not json"), cli::kExitContract);
}

TEST(CliExitCodes, ProviderFailure) {
  TempDir dir;
  ingest_fixture(dir);
  write(dir / "remote.json", R"({"provider":{"mode":"remote","endpoint":"http://127.0.0.1:1"}})");
  const Outcome r = run_cli({"extract", "--program", fixture("program.json"), "--corpus",
                             (dir / "corpus.json").string(), "--config", (dir / "remote.json").string(), "--out",
                             (dir / "x.json").string()});
  EXPECT_EQ(r.code, cli::kExitProvider) << r.err;
}

TEST(CliExitCodes, CapExceeded) {
  TempDir dir;
  ingest_fixture(dir);
  write(dir / "cfg.json", R"({"provider":{"gazetteers":[")" + fixture("gazetteer.tsv") +
                              R"("]},"grammar":{"thresholds":[1.0],"answer_atoms":false,"entity_labels":["ORG"],)"
                              R"("k_grid":[1],"delimiters":[","],"guard_depth":2,"extractor_depth":2},)"
                              R"("synth":{"brute_force_cap":1}})");
  const Outcome r = run_cli({"oracle", "--corpus", (dir / "corpus.json").string(), "--labels", fixture("labels.json"),
                             "--question", testing::kQuestion, "--keywords", fixture("keywords.txt"), "--config",
                             (dir / "cfg.json").string(), "--out", (dir / "set.json").string()});
  EXPECT_EQ(r.code, cli::kExitCap) << r.err;

  write(dir / "cfg2.json", R"({"synth":{"max_examples":1}})");
  EXPECT_EQ(run_cli({"synthesize", "--corpus", (dir / "corpus.json").string(), "--labels", fixture("labels.json"),
                     "--question", testing::kQuestion, "--keywords", fixture("keywords.txt"), "--config",
                     (dir / "cfg2.json").string(), "--out", (dir / "set.json").string()})
                .code,
            cli::kExitCap);
}

TEST(CliExitCodes, ExceptionMapping) {
  EXPECT_EQ(cli::exit_code_for(ContractViolation("x")), cli::kExitContract);
  EXPECT_EQ(cli::exit_code_for(LookupError("x")), cli::kExitContract);
  EXPECT_EQ(cli::exit_code_for(DecodeError("x")), cli::kExitContract);
  EXPECT_EQ(cli::exit_code_for(ConfigError("x")), cli::kExitContract);
  EXPECT_EQ(cli::exit_code_for(ProviderError("x")), cli::kExitProvider);
  EXPECT_EQ(cli::exit_code_for(CapExceeded("x")), cli::kExitCap);
}

TEST(CliConfig, PathsResolveAgainstConfigDirectory) {
  const cli::RunConfig cfg = cli::load_config(fs::path(fixture("config.json")));
  ASSERT_EQ(cfg.provider.gazetteers.size(), 1u);
  EXPECT_EQ(fs::weakly_canonical(cfg.provider.gazetteers[0]), fs::weakly_canonical(fixture("gazetteer.tsv")));
  EXPECT_EQ(cfg.suggest.entity_labels, (std::vector<std::string>{"ORG", "PERSON", "DATE"}));
  EXPECT_EQ(cfg.ensemble_size, 200u);
}

TEST(CliConfig, KwOnlyDropsAnswerAtomAndNlOnlyDropsKeywords) {
  cli::RunConfig kw;
  kw.thresholds = std::vector<double>{0.5};
  kw.atom_labels = std::vector<std::string>{};
  kw.kw_only = true;
  cli::finalize_grammar(kw);
  EXPECT_EQ(kw.synth.grammar.atoms, (std::vector<PredicateKind>{PredicateKind::keyword(0.5)}));

  cli::RunConfig nl = kw;
  nl.kw_only = false;
  nl.nl_only = true;
  cli::finalize_grammar(nl);
  EXPECT_EQ(nl.synth.grammar.atoms, (std::vector<PredicateKind>{PredicateKind::answer()}));
}

}  // namespace
}  // namespace webqa
