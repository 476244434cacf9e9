#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "authorship/eval/eval.hpp"
#include "synthetic_corpus.hpp"

using namespace authorship;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("authorship_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(const std::string& args) {
  static const auto dir = scratch("io");
  const auto out = dir / "stdout", err = dir / "stderr";
  const std::string cmd = std::string(AUTHORSHIP_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

eval::ExperimentConfig toy_config() {
  eval::ExperimentConfig cfg;
  cfg.vector_sizes = {12};
  cfg.document_sizes = {60};
  cfg.seed = 5;
  for (const auto& st : synthetic::styles()) {
    eval::AuthorConfig a;
    a.author_id = st.id;
    a.embedding.window = 3;
    a.embedding.negative = 4;
    a.embedding.iterations = 8;
    a.embedding.alpha = 0.05;
    a.mlp.hidden_layer_sizes = {8};
    a.mlp.max_iter = 400;
    a.mlp.learning_rate_init = 1e-2;
    a.perturbations = {eval::Scenario::Synonym};
    cfg.authors.push_back(a);
  }
  return cfg;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("perturb --engine number --in /dev/null --bogus").code == 2);
  CHECK(run("train-embedding --dim 50").code == 2);
  const auto help = run("--help");
  CHECK(help.code == 0);
  for (const char* sub : {"ingest", "preprocess", "train-embedding", "train-mlp", "perturb", "evaluate", "grid-search",
                          "export-vectors", "serve"})
    CHECK(help.out.find(sub) != std::string::npos);
}

TEST_CASE("perturb writes markup to stdout and the ratio to stderr") {
  const auto dir = scratch("perturb");
  const auto in = dir / "doyle_test.txt";
  std::ofstream(in) << "It was in the year 1607 that the hall was built.";
  const auto r = run("perturb --engine number --cap 1 --in " + in.string());
  CHECK(r.code == 0);
  CHECK(r.out == "It was in the year <1607|one thousand, six hundred and seven> that the hall was built.");
  CHECK(r.err.find("ratio 0.090909 (1/11)") != std::string::npos);

  const auto js = run("perturb --engine number --engine contraction --cap 1 --json --in " + in.string());
  CHECK(js.code == 0);
  const auto j = nlohmann::json::parse(js.out);
  CHECK(j.at("records").size() == 1);

  const auto bad = run("perturb --engine rot13 --in " + in.string());
  CHECK(bad.code == 1);
  CHECK(bad.err.find("unknown scenario 'rot13'") != std::string::npos);
  CHECK(run("perturb --engine synonym --in " + in.string()).code == 1);
}

TEST_CASE("step-by-step training reproduces the matrix and evaluate prints report rows") {
  const auto dir = scratch("pipeline");
  const auto manifest = synthetic::write_corpus(dir / "corpus", 4200);
  const auto manifest_path = dir / "manifest.json";
  std::ofstream(manifest_path) << manifest.to_json().dump(2);
  const auto cfg = toy_config();
  const auto cfg_path = dir / "experiment.json";
  std::ofstream(cfg_path) << cfg.to_json().dump(2);
  const std::string common = " --manifest " + manifest_path.string() + " --config " + cfg_path.string();
  const auto models = dir / "models";

  const auto pre = run("preprocess --docsize 60 --manifest " + manifest_path.string() + " --out " + (dir / "cache").string());
  CHECK(pre.code == 0);
  CHECK(lines(pre.out) == 3);
  CHECK(pre.out.find("\t60:") != std::string::npos);
  CHECK(fs::exists(dir / "cache" / "doyle.tsv.gz"));

  const auto missing = run("evaluate --author doyle --dim 12 --docsize 60 --scenario original --models " +
                           models.string() + common);
  CHECK(missing.code == 1);
  CHECK(missing.err.find("missing models") != std::string::npos);

  for (const auto& st : synthetic::styles()) {
    const auto e = run("train-embedding --author " + st.id + " --dim 12 --models " + models.string() + common);
    CHECK(e.code == 0);
  }
  for (const auto& st : synthetic::styles()) {
    const auto m = run("train-mlp --author " + st.id + " --dim 12 --docsize 60 --models " + models.string() + common);
    CHECK(m.code == 0);
    CHECK(m.out.find("validation accuracy") != std::string::npos);
  }

  // the same artifacts as run_matrix
  const auto corpus = eval::Corpus::load(manifest, text::StopwordSet::default_set(), text::default_resources());
  eval::MatrixOptions opt;
  opt.models = eval::ModelPaths{dir / "matrix"};
  const auto reports = eval::run_matrix(corpus, cfg, eval::Resources::defaults(), opt);
  for (const auto& st : synthetic::styles()) {
    CHECK(slurp(eval::ModelPaths{models}.embedding(st.id, 12)) == slurp(opt.models->embedding(st.id, 12)));
    CHECK(slurp(eval::ModelPaths{models}.classifier(st.id, 12, 60)) == slurp(opt.models->classifier(st.id, 12, 60)));
  }

  const auto ev = run("evaluate --author doyle --dim 12 --docsize 60 --scenario original --models " + models.string() + common);
  CHECK(ev.code == 0);
  REQUIRE(lines(ev.out) == 2);
  const auto row = ev.out.substr(ev.out.find('\n') + 1);
  CHECK(row.rfind("doyle,12,60,Original,", 0) == 0);
  std::vector<eval::EvalReport> doyle;
  for (const auto& r : reports)
    if (r.author_id == "doyle" && r.scenario == eval::Scenario::Original) doyle.push_back(r);
  CHECK(ev.out == eval::reports_to_csv(doyle));

  const auto all = run("evaluate --json " + (dir / "reports.json").string() + " --models " + models.string() + common);
  CHECK(all.code == 0);
  CHECK(all.out == eval::reports_to_csv(reports));
  CHECK(nlohmann::json::parse(slurp(dir / "reports.json")) == eval::reports_to_json(reports));

  const auto ex = run("export-vectors --author rinehart --dim 12 --similar Ghost -k 5 --random 5 --models " +
                      models.string() + common);
  CHECK(ex.code == 0);
  CHECK(lines(ex.out) == 11);
  CHECK(ex.out.rfind("ghost\tquery\t", 0) == 0);
  const auto docs = run("export-vectors --author rinehart --dim 12 --documents 60 --models " + models.string() + common);
  CHECK(docs.code == 0);
  std::size_t n_docs = 0;
  for (const auto& [id, s] : corpus.streams) n_docs += text::partition(s, 60).size();
  CHECK(lines(docs.out) == n_docs);
  CHECK(run("export-vectors --author rinehart --dim 12 --word zzzz --models " + models.string() + common).code == 1);

  std::ofstream(dir / "mlp_grid.json") << R"({"axes": [["hidden_layer_sizes", [[4], [8]]], ["alpha", [0.0001, 0.01]]]})";
  const auto grid = run("grid-search --kind mlp --author christie --dim 12 --docsize 60 --grid " +
                        (dir / "mlp_grid.json").string() + " --heatmap-rows hidden_layer_sizes --heatmap-cols alpha --heatmap " +
                        (dir / "heat.csv").string() + " --models " + models.string() + common);
  CHECK(grid.code == 0);
  const auto g = nlohmann::json::parse(grid.out);
  CHECK(g.at("table").size() == 4);
  CHECK(g.at("best_score").get<double>() > 0.5);
  CHECK(slurp(dir / "heat.csv").rfind("hidden_layer_sizes\\alpha,0.0001,0.01\n", 0) == 0);

  const auto ing = run("ingest --manifest " + manifest_path.string() + " --out " + (dir / "raw").string());
  CHECK(ing.code == 0);
  CHECK(slurp(dir / "raw" / "christie.txt") == text::load_corpus(manifest).at("christie").content);
}

TEST_CASE("serve rejects an invalid configuration") {
  const auto r = run("serve --port 70000 --models /nonexistent/models");
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}
