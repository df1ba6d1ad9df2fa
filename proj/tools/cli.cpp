#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "lmsbn/bench.hpp"
#include "lmsbn/error.hpp"
#include "lmsbn/inference.hpp"
#include "lmsbn/io.hpp"
#include "lmsbn/metrics.hpp"
#include "lmsbn/ordering.hpp"
#include "lmsbn/parallel.hpp"
#include "lmsbn/synth.hpp"
#include "lmsbn/training.hpp"

namespace lmsbn::cli {

namespace {

struct DataArgs {
  std::string path;
  std::optional<int> outputs;
  std::optional<int> inputs;
  int label_base = 1;

  Dataset load() const { return parse_multilabel_svmlight(path, {outputs, inputs, label_base}); }
};

void add_data_options(CLI::App* cmd, DataArgs& data, bool shape_options) {
  cmd->add_option("--data", data.path, "Multi-label svmlight file")->required();
  cmd->add_option("--label-base", data.label_base, "Number of the first label in the file")->capture_default_str();
  if (shape_options) {
    cmd->add_option("--outputs", data.outputs, "Fix the number of labels K");
    cmd->add_option("--inputs", data.inputs, "Fix the input dimension D");
  }
}

GraphSpec build_graph(const std::string& shape, GraphKind kind, int k, int d, std::vector<int> order) {
  if (shape == "full") return full_graph(kind, k, d, std::move(order));
  if (shape == "chain") return chain_graph(kind, k, d, std::move(order));
  if (shape == "independent") {
    const GraphSpec g = independent_graph(kind, k, d);
    return GraphSpec(kind, k, d, std::move(order), g.cliques());
  }
  throw PreconditionError("unknown graph '" + shape + "'");
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw Error("cannot write " + path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

// --- train ------------------------------------------------------------------

struct TrainArgs {
  DataArgs data;
  std::string model = "lmsbn";
  std::string graph = "full";
  std::string order = "index";
  std::optional<double> lambda;
  double eta0 = 0.0;
  int epochs = 1000;
  double tol = 1e-4;
  std::uint64_t seed = 1;
  std::string out;
  std::string log;
  bool scale = false;
};

int do_train(const TrainArgs& a, std::ostream& out) {
  Dataset data = a.data.load();
  if (data.empty()) throw PreconditionError("training file has no instances");
  const bool directed = a.model == "lmsbn";
  if (!directed && a.order == "fscore") throw PreconditionError("--order fscore applies to lmsbn models only");
  if (directed && a.eta0 != 0.0) throw PreconditionError("--eta0 applies to lmbm models only");

  std::optional<FeatureScaling> scaling;
  if (a.scale) {
    scaling = FeatureScaling::fit(data);
    scaling->apply(data);
  }

  TrainConfig config;
  config.lambda = a.lambda.value_or(1.0 / static_cast<double>(data.size()));
  config.eta0 = a.eta0;
  config.max_epochs = a.epochs;
  config.tolerance = a.tol;
  config.shuffle_seed = a.seed;
  validate(config);

  const int k = data.num_outputs;
  const int d = data.input_dim;
  std::vector<int> order = a.order == "fscore" ? fscore_order(data, config) : index_order(k);
  const GraphSpec graph =
      build_graph(a.graph, directed ? GraphKind::directed : GraphKind::undirected, k, d, std::move(order));
  const TrainResult result = directed ? train_lmsbn(data, graph, config) : train_lmbm(data, graph, config);

  save_model({graph, result.weights, {result.epochs(), result.gap()}, scaling}, a.out);

  const std::string log_path = a.log.empty() ? a.out + ".log" : a.log;
  std::ofstream log(log_path);
  if (!log) throw Error("cannot write " + log_path);
  log << "problem,epoch,gap\n";
  for (std::size_t p = 0; p < result.stats.size(); ++p) {
    const auto& history = result.stats[p].gap_history;
    for (std::size_t e = 0; e < history.size(); ++e) log << p << ',' << e + 1 << ',' << format_double(history[e]) << '\n';
  }

  out << "model=" << a.model << " K=" << k << " D=" << d << " N=" << data.size() << " cliques=" << graph.num_cliques()
      << " lambda=" << format_double(config.lambda) << " epochs=" << result.epochs()
      << " gap=" << format_double(result.gap()) << " converged=" << (result.converged() ? "yes" : "no") << '\n';
  return 0;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model_file;
  DataArgs data;
  double cutoff = 1e9;
  std::uint64_t max_states = 0;
  bool escalate = false;
  std::string infer = "bb";
  int sweeps = 100;
  std::string out;
};

Dataset load_for_model(const DataArgs& args, const ModelFile& model) {
  Dataset data = parse_multilabel_svmlight(
      args.path, {model.graph.num_outputs(), model.graph.input_dim(), args.label_base});
  if (model.scaling) model.scaling->apply(data);
  return data;
}

int do_predict(const PredictArgs& a, std::ostream& out) {
  const ModelFile model = load_model(a.model_file);
  if (a.infer == "bb" && !model.graph.directed()) {
    throw PreconditionError("--infer bb needs a directed (lmsbn) model; use exhaustive or icm");
  }
  const Dataset data = load_for_model(a.data, model);

  std::vector<InferenceResult> results(data.size());
  const BBConfig bb{a.cutoff, a.max_states, a.escalate};
  parallel_for(data.size(), [&](std::size_t l) {
    const ConditionedModel m(model.graph, model.weights, data.instances[l].x);
    if (a.infer == "bb") {
      results[l] = bb_infer(m, bb);
    } else if (a.infer == "exhaustive") {
      results[l] = exhaustive_infer(m);
    } else {
      results[l] = icm_infer(m, unary_labels(m), a.sweeps);
    }
  });

  Output sink(a.out, out);
  for (const InferenceResult& r : results) write_prediction(sink.stream(), r);
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string truth;
  int label_base = 1;
};

int do_eval(const EvalArgs& a, std::ostream& out) {
  std::ifstream pin(a.pred);
  if (!pin) throw Error("cannot open " + a.pred);
  const std::vector<PredictionLine> lines = read_predictions(pin);
  if (lines.empty()) throw PreconditionError("prediction file is empty");
  const auto k = static_cast<int>(lines.front().y.size());
  const Dataset truth = parse_multilabel_svmlight(a.truth, {k, std::nullopt, a.label_base});
  if (truth.size() != lines.size()) {
    throw PreconditionError("prediction file has " + std::to_string(lines.size()) + " lines, truth file " +
                            std::to_string(truth.size()));
  }
  std::vector<Labels> truths;
  std::vector<Labels> preds;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    truths.push_back(truth.instances[l].y);
    preds.push_back(lines[l].y);
  }
  const MetricReport r = evaluate(truths, preds);
  out << "E,H,Fsam,Fmac,Fmic\n"
      << format_double(r.exact_match) << ',' << format_double(r.hamming) << ',' << format_double(r.f_sample) << ','
      << format_double(r.f_macro) << ',' << format_double(r.f_micro) << '\n';
  return 0;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string model_file;
  DataArgs data;
  std::vector<double> cutoffs;
  std::uint64_t max_states = 0;
  std::vector<int> sizes;
  int inputs = 5;
  std::size_t train = 500;
  std::size_t test = 200;
  std::optional<double> lambda;
  double planted_stddev = 1.0;
  double random_stddev = 0.1;
  std::uint64_t seed = 1;
  std::string out;
};

int do_bench(const BenchArgs& a, std::ostream& out) {
  Output sink(a.out, out);
  if (!a.sizes.empty()) {
    if (!a.cutoffs.empty() || !a.model_file.empty()) {
      throw PreconditionError("--k-list runs on synthetic data; drop --S-list and --model-file");
    }
    SizeSweepConfig config;
    config.sizes = a.sizes;
    config.input_dim = a.inputs;
    config.train_instances = a.train;
    config.test_instances = a.test;
    config.planted_stddev = a.planted_stddev;
    config.random_stddev = a.random_stddev;
    config.train.lambda = a.lambda.value_or(1.0 / static_cast<double>(a.train));
    config.seed = a.seed;
    config.max_states = a.max_states;
    write_size_csv(sink.stream(), size_sweep(config));
    return 0;
  }
  if (a.model_file.empty() || a.data.path.empty() || a.cutoffs.empty()) {
    throw PreconditionError("bench needs --model-file, --data and --S-list, or --k-list");
  }
  const ModelFile model = load_model(a.model_file);
  const Dataset data = load_for_model(a.data, model);
  write_bench_csv(sink.stream(), cutoff_sweep(model.graph, model.weights, data, a.cutoffs, a.max_states));
  return 0;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string kind = "sbn";
  std::string graph = "full";
  int outputs = 5;
  int inputs = 3;
  std::size_t instances = 1000;
  std::size_t test_instances = 0;
  double stddev = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string test_out;
  std::string model_out;
};

void write_dataset(const Dataset& data, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error("cannot write " + path);
  write_multilabel_svmlight(file, data);
}

int do_synth(const SynthArgs& a, std::ostream& out) {
  const bool directed = a.kind == "sbn";
  const GraphSpec graph = build_graph(a.graph, directed ? GraphKind::directed : GraphKind::undirected, a.outputs,
                                      a.inputs, index_order(a.outputs));
  const WeightVector planted = random_weights(graph, a.stddev, a.seed);
  auto sample = [&](std::uint64_t seed, std::size_t n) {
    const SynthConfig config{seed, n, graph, planted};
    return directed ? sample_sbn(config) : sample_bm(config);
  };

  write_dataset(sample(a.seed + 1, a.instances), a.out);
  if (!a.test_out.empty()) write_dataset(sample(a.seed + 2, a.test_instances ? a.test_instances : a.instances), a.test_out);
  if (!a.model_out.empty()) save_model({graph, planted, {}, std::nullopt}, a.model_out);
  out << "wrote " << a.instances << " instances K=" << a.outputs << " D=" << a.inputs << " to " << a.out << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large margin sigmoid belief networks and Boltzmann machines"};
  app.name("lmsbn");
  app.require_subcommand(1);
  std::function<int()> action;

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a model and write a model file");
  add_data_options(t, train.data, true);
  t->add_option("--model", train.model, "lmsbn or lmbm")->check(CLI::IsMember({"lmsbn", "lmbm"}))->capture_default_str();
  t->add_option("--graph", train.graph, "full, chain or independent")
      ->check(CLI::IsMember({"full", "chain", "independent"}))
      ->capture_default_str();
  t->add_option("--order", train.order, "index or fscore")->check(CLI::IsMember({"index", "fscore"}))->capture_default_str();
  t->add_option("--lambda", train.lambda, "Regularization strength (default 1/N)");
  t->add_option("--eta0", train.eta0, "Extra penalty on coupling cliques (lmbm)")->capture_default_str();
  t->add_option("--epochs", train.epochs, "Maximum epochs")->capture_default_str();
  t->add_option("--tol", train.tol, "Duality gap tolerance")->capture_default_str();
  t->add_option("--seed", train.seed, "Coordinate shuffle seed")->capture_default_str();
  t->add_option("--out", train.out, "Model file to write")->required();
  t->add_option("--log", train.log, "Training log (default <out>.log)");
  t->add_flag("--scale", train.scale, "Min-max scale inputs to [-1, 1]");
  t->callback([&] { action = [&] { return do_train(train, out); }; });

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Predict labels with a trained model");
  p->add_option("--model-file", predict.model_file, "Model file")->required();
  add_data_options(p, predict.data, false);
  p->add_option("--S", predict.cutoff, "Branch and bound cutoff (>= 1)")->capture_default_str();
  p->add_option("--max-states", predict.max_states, "State budget per instance (0 = unlimited)")->capture_default_str();
  p->add_flag("--escalate", predict.escalate, "Double S when no leaf beats it");
  p->add_option("--infer", predict.infer, "bb, exhaustive or icm")
      ->check(CLI::IsMember({"bb", "exhaustive", "icm"}))
      ->capture_default_str();
  p->add_option("--sweeps", predict.sweeps, "ICM sweep limit")->capture_default_str();
  p->add_option("--out", predict.out, "Prediction file (default stdout)");
  p->callback([&] { action = [&] { return do_predict(predict, out); }; });

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score a prediction file against labelled data");
  e->add_option("--pred", eval.pred, "Prediction file")->required();
  e->add_option("--truth", eval.truth, "Multi-label svmlight file with the true labels")->required();
  e->add_option("--label-base", eval.label_base, "Number of the first label in the truth file")->capture_default_str();
  e->callback([&] { action = [&] { return do_eval(eval, out); }; });

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Cutoff sweep on a model, or size sweep on synthetic data");
  b->add_option("--model-file", bench.model_file, "Directed model file");
  b->add_option("--data", bench.data.path, "Test data");
  b->add_option("--label-base", bench.data.label_base, "Number of the first label in the file")->capture_default_str();
  b->add_option("--S-list", bench.cutoffs, "Cutoffs, comma separated")->delimiter(',');
  b->add_option("--max-states", bench.max_states, "Cap on the per-instance state budget (0 = none)")
      ->capture_default_str();
  b->add_option("--k-list", bench.sizes, "Output counts for the size sweep, comma separated")->delimiter(',');
  b->add_option("--inputs", bench.inputs, "Size sweep input dimension")->capture_default_str();
  b->add_option("--train", bench.train, "Size sweep training instances")->capture_default_str();
  b->add_option("--test", bench.test, "Size sweep test instances")->capture_default_str();
  b->add_option("--lambda", bench.lambda, "Size sweep regularization (default 1/N)");
  b->add_option("--planted-stddev", bench.planted_stddev, "Size sweep planted weight scale")->capture_default_str();
  b->add_option("--random-stddev", bench.random_stddev, "Size sweep untrained weight scale (0 = trained RMS)")
      ->capture_default_str();
  b->add_option("--seed", bench.seed, "Size sweep seed")->capture_default_str();
  b->add_option("--out", bench.out, "CSV file (default stdout)");
  b->callback([&] { action = [&] { return do_bench(bench, out); }; });

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Sample a dataset from a random planted model");
  s->add_option("--kind", synth.kind, "sbn or bm")->check(CLI::IsMember({"sbn", "bm"}))->capture_default_str();
  s->add_option("--graph", synth.graph, "full, chain or independent")
      ->check(CLI::IsMember({"full", "chain", "independent"}))
      ->capture_default_str();
  s->add_option("--outputs", synth.outputs, "K")->capture_default_str();
  s->add_option("--inputs", synth.inputs, "D")->capture_default_str();
  s->add_option("--instances", synth.instances, "Instances to sample")->capture_default_str();
  s->add_option("--stddev", synth.stddev, "Planted weight scale")->capture_default_str();
  s->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  s->add_option("--out", synth.out, "Data file to write")->required();
  s->add_option("--test-out", synth.test_out, "Second sample from the same model");
  s->add_option("--test-instances", synth.test_instances, "Instances in the second sample (default --instances)");
  s->add_option("--model-out", synth.model_out, "Write the planted model");
  s->callback([&] { action = [&] { return do_synth(synth, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err);
  }

  try {
    return action();
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace lmsbn::cli
