#include "fewshot_cli/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fewshot/adaptation.hpp"
#include "fewshot/detector_bank.hpp"
#include "fewshot/embedding.hpp"
#include "fewshot/error.hpp"
#include "fewshot/evaluation.hpp"
#include "fewshot/kernel_svm.hpp"
#include "fewshot/model_io.hpp"
#include "fewshot/numeric_text.hpp"
#include "fewshot/pseudo_samples.hpp"
#include "fewshot/sample_io.hpp"
#include "fewshot/synth_bench.hpp"

namespace fewshot::cli {
namespace {

namespace fs = std::filesystem;

// Flag combinations CLI11 cannot express on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  double c = 1.0;
  double tol = 1e-6;
  std::size_t max_passes = 10000;
  std::string kernel = "linear";
  double bandwidth = 1.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--c", c, "Soft-margin constant C")->capture_default_str();
    app->add_option("--tol", tol, "KKT tolerance")->capture_default_str();
    app->add_option("--max-passes", max_passes, "Iteration budget in units of the sample count")
        ->capture_default_str();
    app->add_option("--kernel", kernel, "linear or gaussian")->capture_default_str();
    app->add_option("--bandwidth", bandwidth, "Gaussian kernel bandwidth")->capture_default_str();
    app->add_option("--seed", seed, "Sample order seed (0 keeps file order)")->capture_default_str();
  }

  SolverConfig solver() const {
    SolverConfig config;
    config.c_param = c;
    config.kkt_tolerance = tol;
    config.max_passes = max_passes;
    config.sample_order_seed = seed;
    config.validate();
    return config;
  }

  KernelSpec kernel_spec() const {
    KernelSpec spec{parse_kernel_kind(kernel), bandwidth};
    spec.validate();
    return spec;
  }
};

struct PseudoFlags {
  std::string embeddings;
  std::string bank;
  std::string target;
  double lambda = kDefaultLambda;
  std::optional<std::size_t> top_k;
  bool clamp = false;
  bool raw_bank = false;

  void attach(CLI::App* app, bool bank_required) {
    auto* e = app->add_option("--embeddings", embeddings, "Word vector file");
    auto* b = app->add_option("--bank", bank, "Detector bank JSON");
    auto* t = app->add_option("--target", target, "Target concept name");
    if (bank_required) {
      e->required();
      b->required();
      t->required();
    }
    app->add_option("--lambda", lambda, "Pseudo sample scale")->capture_default_str();
    app->add_option("--top-k", top_k, "Keep only the k most similar detectors");
    app->add_flag("--clamp-negative", clamp, "Drop detectors with negative similarity");
  }

  PseudoOptions options() const { return {lambda, clamp, top_k}; }
};

template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer&& writer) {
  if (path.empty()) {
    writer(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw DataError("cannot write " + path);
  }
  writer(file);
  if (!file) {
    throw DataError("error writing " + path);
  }
}

void write_scores(std::ostream& out, const std::vector<double>& scores) {
  for (double s : scores) {
    out << format_real(s) << '\n';
  }
}

std::vector<double> read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path);
  }
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      scores.push_back(parse_real(line));
    } catch (const DataError&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return scores;
}

std::vector<double> score_features(const DualModel& model, const SampleFile& test) {
  if (test.dim != model.dim) {
    throw DataError("test dimension " + std::to_string(test.dim) + " does not match model dimension " +
                    std::to_string(model.dim));
  }
  return score_all(model, test.features);
}

// --- subcommands ---------------------------------------------------------

struct ComposeArgs {
  PseudoFlags pseudo;
  double bias = 0.0;
  std::string test;
  std::string scores;
  std::string out;
};

int cmd_compose(const ComposeArgs& a, std::ostream& out) {
  const auto store = load_embeddings(a.pseudo.embeddings);
  const auto bank = load_bank(a.pseudo.bank);
  const auto det = compose_zero_shot(a.pseudo.target, bank, store, a.pseudo.top_k, a.bias);

  nlohmann::json doc;
  doc["target"] = det.target;
  doc["bias"] = det.bias;
  doc["betas"] = nlohmann::json::array();
  for (std::size_t j = 0; j < bank.size(); ++j) {
    doc["betas"].push_back({{"concept", bank[j].concept_name}, {"beta", det.betas[j]}});
  }
  emit(a.out, out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });

  if (!a.test.empty()) {
    const auto test = load_sample_file(a.test);
    if (test.dim != bank.dim()) {
      throw DataError("test dimension does not match bank dimension");
    }
    std::vector<double> scores;
    scores.reserve(test.features.size());
    for (const auto& x : test.features) {
      scores.push_back(zero_shot_score(x, det));
    }
    emit(a.scores, out, [&](std::ostream& o) { write_scores(o, scores); });
  }
  return kOk;
}

struct PseudoArgs {
  PseudoFlags pseudo;
  std::string out;
};

int cmd_gen_pseudo(const PseudoArgs& a, std::ostream& out) {
  const auto store = load_embeddings(a.pseudo.embeddings);
  const auto bank = load_bank(a.pseudo.bank);
  const auto set = generate_pseudo(bank, a.pseudo.target, store, a.pseudo.options());
  const auto file = from_binary_samples(set.samples, bank.dim());
  emit(a.out, out, [&](std::ostream& o) { write_sample_file(o, file); });
  return kOk;
}

struct TrainArgs {
  SolverFlags solver;
  std::string samples;
  std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto samples = load_binary_samples(a.samples);
  const auto model = train_svm(samples, a.solver.solver(), a.solver.kernel_spec());
  emit(a.out, out, [&](std::ostream& o) { write_model(o, model); });
  return kOk;
}

struct AdaptArgs {
  SolverFlags solver;
  PseudoFlags pseudo;
  std::string samples;
  bool zeroshot_exact = false;
  std::string out;
};

int cmd_adapt(const AdaptArgs& a, std::ostream& out) {
  if (a.pseudo.bank.empty() && a.samples.empty()) {
    throw UsageError("adapt needs --bank, --samples, or both");
  }
  if (!a.pseudo.bank.empty() && (a.pseudo.embeddings.empty() || a.pseudo.target.empty())) {
    throw UsageError("--bank requires --embeddings and --target");
  }

  AdaptationConfig config;
  config.lambda = a.pseudo.lambda;
  config.solver = a.solver.solver();
  config.kernel = a.solver.kernel_spec();
  config.top_k = a.pseudo.top_k;
  config.clamp_negative_sim = a.pseudo.clamp;
  config.zeroshot_exact = a.zeroshot_exact;
  config.validate();

  std::vector<LabeledSample> samples;
  if (!a.samples.empty()) samples = load_binary_samples(a.samples);

  DetectorBank bank;
  EmbeddingStore store(1);
  if (!a.pseudo.bank.empty()) {
    bank = load_bank(a.pseudo.bank);
    store = load_embeddings(a.pseudo.embeddings);
  }
  const auto det = adapt(samples, bank, a.pseudo.target, store, config);
  emit(a.out, out, [&](std::ostream& o) { write_model(o, det); });
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string test;
  std::string out;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto file = load_model(a.model);
  const auto test = load_sample_file(a.test);
  const auto scores = score_features(file.model, test);
  emit(a.out, out, [&](std::ostream& o) { write_scores(o, scores); });
  return kOk;
}

struct EvaluateArgs {
  std::vector<std::string> models;
  std::string scores;
  std::string test;
  std::string metric = "ap";
  std::size_t k = 5;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto test = load_sample_file(a.test);
  double value = 0.0;

  if (a.metric == "ap") {
    if (a.models.size() + (a.scores.empty() ? 0 : 1) != 1) {
      throw UsageError("--metric ap takes exactly one of --model or --scores");
    }
    RankedResult ranked;
    if (!a.scores.empty()) {
      ranked.scores = read_scores(a.scores);
      if (ranked.scores.size() != test.features.size()) {
        throw DataError("score file has " + std::to_string(ranked.scores.size()) + " lines but the test file has " +
                        std::to_string(test.features.size()) + " samples");
      }
    } else {
      ranked.scores = score_features(load_model(a.models.front()).model, test);
    }
    for (const auto& s : to_binary_samples(test)) {
      ranked.relevance.push_back(s.label > 0 ? 1 : 0);
    }
    value = average_precision(ranked);
  } else if (a.metric == "topk") {
    if (a.models.size() < 2 || !a.scores.empty()) {
      throw UsageError("--metric topk takes one --model per class and no --scores");
    }
    std::vector<std::string> classes;
    std::vector<std::vector<double>> per_class;
    for (const auto& path : a.models) {
      const auto file = load_model(path);
      if (!file.adaptation) {
        throw DataError(path + " has no target concept; top-k needs adapted models");
      }
      classes.push_back(normalize_token(file.adaptation->target));
      per_class.push_back(score_features(file.model, test));
    }
    std::vector<std::vector<double>> matrix(test.features.size(), std::vector<double>(classes.size()));
    std::vector<std::size_t> truth;
    for (std::size_t i = 0; i < test.features.size(); ++i) {
      for (std::size_t c = 0; c < classes.size(); ++c) matrix[i][c] = per_class[c][i];
      const auto label = normalize_token(test.labels[i]);
      std::size_t c = 0;
      while (c < classes.size() && classes[c] != label) ++c;
      if (c == classes.size()) {
        throw DataError("test label '" + test.labels[i] + "' matches no model target");
      }
      truth.push_back(c);
    }
    value = top_k_accuracy(matrix, truth, a.k);
  } else {
    throw UsageError("unknown metric '" + a.metric + "' (expected ap or topk)");
  }

  emit(a.out, out, [&](std::ostream& o) { o << format_real(value) << '\n'; });
  return kOk;
}

struct FuseArgs {
  std::vector<std::string> inputs;
  std::vector<double> weights;
  bool no_normalize = false;
  std::string out;
};

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
  std::vector<std::vector<double>> lists;
  for (const auto& path : a.inputs) lists.push_back(read_scores(path));
  const auto fused = fuse_scores(lists, a.weights, !a.no_normalize);
  emit(a.out, out, [&](std::ostream& o) { write_scores(o, fused); });
  return kOk;
}

struct SweepArgs {
  SyntheticWorldSpec spec;
  std::vector<std::size_t> n_values{0, 1, 2, 5, 10, 20, 100};
  std::size_t replicates = 10;
  double lambda = kDefaultLambda;
  double c = 1.0;
  double tol = 1e-6;
  bool zeroshot_exact = false;
  std::string dump_world;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  a.spec.validate();
  AdaptationConfig config;
  config.lambda = a.lambda;
  config.solver.c_param = a.c;
  config.solver.kkt_tolerance = a.tol;
  config.zeroshot_exact = a.zeroshot_exact;
  config.validate();
  config.solver.validate();

  const auto world = generate_world(a.spec);
  if (!a.dump_world.empty()) {
    const fs::path dir(a.dump_world);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    save_embeddings(dir / "embeddings.txt", world.store);
    save_bank(dir / "bank.json", world.bank);
    SampleFile test;
    test.dim = world.spec.feature_dim;
    test.features = world.test_features;
    for (int c : world.test_class) {
      test.labels.push_back(c < 0 ? std::string("background") : world.novel[static_cast<std::size_t>(c)].token);
    }
    std::ofstream f(dir / "test.txt", std::ios::binary);
    if (!f) throw DataError("cannot write " + (dir / "test.txt").string());
    write_sample_file(f, test);
  }
  const auto report = run_sweep(world, a.n_values, a.replicates, config);
  emit(a.out, out, [&](std::ostream& o) { write_sweep_csv(o, report); });
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot adaptation of concept detectors", "fewshot"};
  app.require_subcommand(1);

  ComposeArgs compose;
  auto* c_compose = app.add_subcommand("compose-zeroshot", "Similarity-weighted zero-shot detector");
  compose.pseudo.attach(c_compose, true);
  c_compose->add_option("--bias", compose.bias, "Constant added to every score");
  c_compose->add_option("--test", compose.test, "Sample file to score");
  auto* scores_opt = c_compose->add_option("--scores", compose.scores, "Score output (default stdout)");
  scores_opt->needs(c_compose->get_option("--test"));
  c_compose->add_option("--out", compose.out, "Detector JSON output (default stdout)");
  c_compose->remove_option(c_compose->get_option("--lambda"));
  c_compose->remove_option(c_compose->get_option("--clamp-negative"));

  PseudoArgs pseudo;
  auto* c_pseudo = app.add_subcommand("gen-pseudo", "Write the pseudo sample set as a sample file");
  pseudo.pseudo.attach(c_pseudo, true);
  c_pseudo->add_option("--out", pseudo.out, "Output file (default stdout)");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a max-margin detector on real samples");
  c_train->add_option("--samples", train.samples, "Binary sample file")->required();
  train.solver.attach(c_train);
  c_train->add_option("--out", train.out, "Model JSON output (default stdout)");

  AdaptArgs adapt_args;
  auto* c_adapt = app.add_subcommand("adapt", "Train on real samples plus bank pseudo samples");
  adapt_args.pseudo.attach(c_adapt, false);
  c_adapt->add_option("--samples", adapt_args.samples, "Binary sample file");
  adapt_args.solver.attach(c_adapt);
  c_adapt->add_flag("--zeroshot-exact", adapt_args.zeroshot_exact,
                    "With no samples, shrink C so the model ranks like the zero-shot detector");
  c_adapt->add_option("--out", adapt_args.out, "Model JSON output (default stdout)");

  PredictArgs predict;
  auto* c_predict = app.add_subcommand("predict", "Score a sample file with a model");
  c_predict->add_option("--model", predict.model, "Model JSON")->required();
  c_predict->add_option("--test", predict.test, "Sample file")->required();
  c_predict->add_option("--out", predict.out, "Score output (default stdout)");

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Average precision or top-k accuracy");
  c_eval->add_option("--model", evaluate.models, "Model JSON (repeat once per class for topk)");
  c_eval->add_option("--scores", evaluate.scores, "Precomputed scores, one per line (ap only)");
  c_eval->add_option("--test", evaluate.test, "Labelled sample file")->required();
  c_eval->add_option("--metric", evaluate.metric, "ap or topk")->capture_default_str();
  c_eval->add_option("--k", evaluate.k, "k for topk")->capture_default_str();
  c_eval->add_option("--out", evaluate.out, "Output (default stdout)");

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "Late fusion of score files");
  c_fuse->add_option("--scores", fuse.inputs, "Score file, one score per line (repeatable)")->required();
  c_fuse->add_option("--weights", fuse.weights, "Comma separated weights")->delimiter(',');
  c_fuse->add_flag("--no-normalize", fuse.no_normalize, "Average raw scores");
  c_fuse->add_option("--out", fuse.out, "Output (default stdout)");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("synth-sweep", "Zero/few/many-shot sweep on a synthetic world");
  c_sweep->add_option("--feature-dim", sweep.spec.feature_dim)->capture_default_str();
  c_sweep->add_option("--embed-dim", sweep.spec.embed_dim)->capture_default_str();
  c_sweep->add_option("--n-base", sweep.spec.n_base)->capture_default_str();
  c_sweep->add_option("--n-novel", sweep.spec.n_novel)->capture_default_str();
  c_sweep->add_option("--train-per-base", sweep.spec.train_per_base)->capture_default_str();
  c_sweep->add_option("--pool-per-novel", sweep.spec.pool_per_novel)->capture_default_str();
  c_sweep->add_option("--noise-sigma", sweep.spec.noise_sigma)->capture_default_str();
  c_sweep->add_option("--coupling", sweep.spec.coupling)->capture_default_str();
  c_sweep->add_option("--seed", sweep.spec.seed, "World and replicate seed")->capture_default_str();
  c_sweep->add_option("--n", sweep.n_values, "Comma separated shot counts")->delimiter(',');
  c_sweep->add_option("--replicates", sweep.replicates)->capture_default_str();
  c_sweep->add_option("--lambda", sweep.lambda)->capture_default_str();
  c_sweep->add_option("--c", sweep.c)->capture_default_str();
  c_sweep->add_option("--tol", sweep.tol, "KKT tolerance")->capture_default_str();
  c_sweep->add_flag("--zeroshot-exact", sweep.zeroshot_exact);
  c_sweep->add_option("--dump-world", sweep.dump_world, "Directory for embeddings, bank and test set");
  c_sweep->add_option("--out", sweep.out, "CSV output (default stdout)");

  try {
    // CLI11 consumes a reversed argument vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_compose->parsed()) return cmd_compose(compose, out);
    if (c_pseudo->parsed()) return cmd_gen_pseudo(pseudo, out);
    if (c_train->parsed()) return cmd_train(train, out);
    if (c_adapt->parsed()) return cmd_adapt(adapt_args, out);
    if (c_predict->parsed()) return cmd_predict(predict, out);
    if (c_eval->parsed()) return cmd_evaluate(evaluate, out);
    if (c_fuse->parsed()) return cmd_fuse(fuse, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace fewshot::cli
