#include "lmsbn/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "lmsbn/error.hpp"

namespace lmsbn {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size()) return std::nullopt;
  return value;
}

namespace {

std::optional<long long> parse_int(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  long long value = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

struct SparseInstance {
  std::vector<int> labels;
  std::vector<std::pair<int, double>> features;
};

}  // namespace

Dataset read_multilabel_svmlight(std::istream& in, const SvmlightOptions& options) {
  if (options.num_outputs && *options.num_outputs < 1) throw PreconditionError("K must be positive");
  if (options.input_dim && *options.input_dim < 0) throw PreconditionError("D must be non-negative");

  std::vector<SparseInstance> rows;
  int max_label = -1;
  int max_feature = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto parts = tokens(view);
    if (parts.empty()) continue;

    SparseInstance row;
    std::size_t first_feature = 0;
    if (parts[0].find(':') == std::string_view::npos) {
      first_feature = 1;
      for (std::string_view label : split(parts[0], ',')) {
        if (label.empty()) continue;
        const auto id = parse_int(label);
        if (!id) throw ParseError(line_no, "malformed label '" + std::string(label) + "'");
        const long long index = *id - options.label_base;
        if (index < 0) throw ParseError(line_no, "label id " + std::string(label) + " below the label base");
        if (options.num_outputs && index >= *options.num_outputs) {
          throw ParseError(line_no, "label id " + std::string(label) + " exceeds K=" +
                                        std::to_string(*options.num_outputs));
        }
        if (index > 1'000'000) throw ParseError(line_no, "label id too large");
        row.labels.push_back(static_cast<int>(index));
        max_label = std::max(max_label, static_cast<int>(index));
      }
    }
    for (std::size_t t = first_feature; t < parts.size(); ++t) {
      const std::string_view tok = parts[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "malformed feature '" + std::string(tok) + "'");
      const auto index = parse_int(tok.substr(0, colon));
      const auto value = parse_double(tok.substr(colon + 1));
      if (!index || !value) throw ParseError(line_no, "malformed feature '" + std::string(tok) + "'");
      if (*index < 1) throw ParseError(line_no, "feature index must be at least 1");
      if (options.input_dim && *index > *options.input_dim) {
        throw ParseError(line_no, "feature index " + std::to_string(*index) + " exceeds D=" +
                                      std::to_string(*options.input_dim));
      }
      if (*index > 100'000'000) throw ParseError(line_no, "feature index too large");
      if (!std::isfinite(*value)) throw ParseError(line_no, "non-finite feature value");
      row.features.emplace_back(static_cast<int>(*index - 1), *value);
      max_feature = std::max(max_feature, static_cast<int>(*index));
    }
    std::sort(row.features.begin(), row.features.end());
    for (std::size_t f = 1; f < row.features.size(); ++f) {
      if (row.features[f].first == row.features[f - 1].first) throw ParseError(line_no, "repeated feature index");
    }
    rows.push_back(std::move(row));
  }

  Dataset data;
  data.num_outputs = options.num_outputs.value_or(std::max(max_label + 1, 1));
  data.input_dim = options.input_dim.value_or(max_feature);
  data.instances.reserve(rows.size());
  for (const SparseInstance& row : rows) {
    Instance inst;
    inst.y.assign(static_cast<std::size_t>(data.num_outputs), -1);
    for (int label : row.labels) inst.y[static_cast<std::size_t>(label)] = 1;
    inst.x.assign(static_cast<std::size_t>(data.input_dim), 0.0);
    for (const auto& [index, value] : row.features) inst.x[static_cast<std::size_t>(index)] = value;
    data.instances.push_back(std::move(inst));
  }
  return data;
}

Dataset parse_multilabel_svmlight(const std::filesystem::path& path, const SvmlightOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_multilabel_svmlight(in, options);
}

void write_multilabel_svmlight(std::ostream& out, const Dataset& data) {
  for (const Instance& inst : data.instances) {
    bool first = true;
    for (std::size_t i = 0; i < inst.y.size(); ++i) {
      if (inst.y[i] != 1) continue;
      out << (first ? "" : ",") << i + 1;
      first = false;
    }
    for (std::size_t d = 0; d < inst.x.size(); ++d) {
      if (inst.x[d] == 0.0) continue;
      out << (first ? "" : " ") << d + 1 << ':' << format_double(inst.x[d]);
      first = false;
    }
    if (first) {
      // A blank line would be skipped on reading.
      if (inst.x.empty()) throw PreconditionError("an instance with no positive labels and no inputs has no text form");
      out << "1:0";
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

FeatureScaling FeatureScaling::fit(const Dataset& data) {
  FeatureScaling s;
  s.min.assign(static_cast<std::size_t>(data.input_dim), INFINITY);
  s.max.assign(static_cast<std::size_t>(data.input_dim), -INFINITY);
  for (const Instance& inst : data.instances) {
    for (std::size_t d = 0; d < inst.x.size(); ++d) {
      s.min[d] = std::min(s.min[d], inst.x[d]);
      s.max[d] = std::max(s.max[d], inst.x[d]);
    }
  }
  for (std::size_t d = 0; d < s.min.size(); ++d) {
    if (!std::isfinite(s.min[d])) s.min[d] = s.max[d] = 0.0;
  }
  return s;
}

void FeatureScaling::apply(std::vector<double>& x) const {
  if (x.size() != min.size()) throw PreconditionError("scaling dimension mismatch");
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double span = max[d] - min[d];
    x[d] = span > 0.0 ? 2.0 * (x[d] - min[d]) / span - 1.0 : 0.0;
  }
}

void FeatureScaling::apply(Dataset& data) const {
  for (Instance& inst : data.instances) apply(inst.x);
}

// ---------------------------------------------------------------------------

void write_model(std::ostream& out, const ModelFile& model) {
  const GraphSpec& g = model.graph;
  check_weights(g, model.weights);
  out << "lmsbn-model " << kModelFormatVersion << '\n';
  out << "kind " << (g.directed() ? "directed" : "undirected") << '\n';
  out << "outputs " << g.num_outputs() << '\n';
  out << "inputs " << g.input_dim() << '\n';
  out << "order";
  for (int node : g.order()) out << ' ' << node + 1;
  out << '\n';
  out << "lambda " << format_double(model.weights.lambda) << '\n';
  out << "eta0 " << format_double(model.weights.eta0) << '\n';
  out << "epochs " << model.info.epochs << '\n';
  out << "gap " << format_double(model.info.final_gap) << '\n';
  if (model.scaling) {
    if (model.scaling->min.size() != static_cast<std::size_t>(g.input_dim())) {
      throw PreconditionError("scaling dimension differs from the graph input dimension");
    }
    out << "scaling " << model.scaling->min.size() << '\n';
    for (std::size_t d = 0; d < model.scaling->min.size(); ++d) {
      out << format_double(model.scaling->min[d]) << ' ' << format_double(model.scaling->max[d]) << '\n';
    }
  } else {
    out << "scaling none\n";
  }
  out << "cliques " << g.num_cliques() << '\n';
  for (std::size_t j = 0; j < g.num_cliques(); ++j) {
    const Clique& c = g.cliques()[j];
    for (std::size_t k = 0; k < c.outputs.size(); ++k) out << (k ? "," : "") << c.outputs[k] + 1;
    out << ' ';
    if (c.input) {
      out << *c.input + 1;
    } else {
      out << '-';
    }
    out << ' ' << format_double(model.weights.w[j]) << '\n';
  }
  out << "end\n";
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> next() {
    for (;;) {
      if (!std::getline(in_, line_)) fail("unexpected end of model file");
      ++line_no_;
      auto parts = tokens(line_);
      if (!parts.empty()) return parts;
    }
  }

  std::vector<std::string_view> keyed(std::string_view key, std::size_t min_values) {
    auto parts = next();
    if (parts[0] != key) fail("expected '" + std::string(key) + "'");
    if (parts.size() < 1 + min_values) fail("missing value for '" + std::string(key) + "'");
    return parts;
  }

  long long integer(std::string_view token) {
    const auto v = parse_int(token);
    if (!v) fail("bad integer '" + std::string(token) + "'");
    return *v;
  }

  double real(std::string_view token) {
    const auto v = parse_double(token);
    if (!v) fail("bad number '" + std::string(token) + "'");
    return *v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace

ModelFile read_model(std::istream& in) {
  ModelReader r(in);
  auto header = r.keyed("lmsbn-model", 1);
  if (r.integer(header[1]) != kModelFormatVersion) {
    r.fail("unsupported model format version " + std::string(header[1]));
  }
  const auto kind_word = r.keyed("kind", 1)[1];
  if (kind_word != "directed" && kind_word != "undirected") r.fail("unknown graph kind");
  const GraphKind kind = kind_word == "directed" ? GraphKind::directed : GraphKind::undirected;
  const long long k = r.integer(r.keyed("outputs", 1)[1]);
  const long long d = r.integer(r.keyed("inputs", 1)[1]);
  if (k < 1 || k > 1'000'000 || d < 0 || d > 100'000'000) r.fail("bad model dimensions");

  const auto order_line = r.keyed("order", static_cast<std::size_t>(k));
  if (order_line.size() != static_cast<std::size_t>(k) + 1) r.fail("order length differs from output count");
  std::vector<int> order;
  for (std::size_t p = 1; p < order_line.size(); ++p) order.push_back(static_cast<int>(r.integer(order_line[p]) - 1));

  WeightVector weights;
  weights.lambda = r.real(r.keyed("lambda", 1)[1]);
  weights.eta0 = r.real(r.keyed("eta0", 1)[1]);
  TrainingInfo info;
  info.epochs = static_cast<int>(r.integer(r.keyed("epochs", 1)[1]));
  info.final_gap = r.real(r.keyed("gap", 1)[1]);

  std::optional<FeatureScaling> scaling;
  const auto scaling_line = r.keyed("scaling", 1);
  if (scaling_line[1] != "none") {
    const long long dims = r.integer(scaling_line[1]);
    if (dims != d) r.fail("scaling dimension differs from inputs");
    FeatureScaling s;
    for (long long i = 0; i < dims; ++i) {
      const auto pair = r.next();
      if (pair.size() != 2) r.fail("scaling line needs min and max");
      s.min.push_back(r.real(pair[0]));
      s.max.push_back(r.real(pair[1]));
    }
    scaling = std::move(s);
  }

  const long long count = r.integer(r.keyed("cliques", 1)[1]);
  if (count < 0 || count > 100'000'000) r.fail("bad clique count");
  std::vector<Clique> cliques;
  cliques.reserve(static_cast<std::size_t>(count));
  weights.w.reserve(static_cast<std::size_t>(count));
  for (long long j = 0; j < count; ++j) {
    const auto parts = r.next();
    if (parts.size() != 3) r.fail("clique line needs outputs, input and weight");
    Clique c;
    for (std::string_view o : split(parts[0], ',')) c.outputs.push_back(static_cast<int>(r.integer(o) - 1));
    if (parts[1] != "-") c.input = static_cast<int>(r.integer(parts[1]) - 1);
    cliques.push_back(std::move(c));
    weights.w.push_back(r.real(parts[2]));
  }
  if (r.next()[0] != "end") r.fail("expected 'end'");

  try {
    GraphSpec graph(kind, static_cast<int>(k), static_cast<int>(d), std::move(order), std::move(cliques));
    return ModelFile{std::move(graph), std::move(weights), info, std::move(scaling)};
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("model file describes an invalid graph: ") + e.what());
  }
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_model(out, model);
  if (!out) throw Error("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_model(in);
}

// ---------------------------------------------------------------------------

void write_prediction(std::ostream& out, const InferenceResult& result) {
  for (std::size_t i = 0; i < result.y_hat.size(); ++i) {
    out << (i ? " " : "") << (result.y_hat[i] > 0 ? "+1" : "-1");
  }
  out << " loss=" << format_double(result.objective) << " states=" << result.states_visited
      << " status=" << to_string(result.status) << '\n';
}

std::vector<PredictionLine> read_predictions(std::istream& in) {
  std::vector<PredictionLine> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = tokens(line);
    if (parts.empty()) continue;
    PredictionLine p;
    bool has_loss = false;
    bool has_states = false;
    bool has_status = false;
    for (std::string_view tok : parts) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos) {
        if (has_loss || has_states || has_status) throw ParseError(line_no, "label after key=value fields");
        const auto v = parse_int(tok);
        if (!v || (*v != 1 && *v != -1)) throw ParseError(line_no, "bad label '" + std::string(tok) + "'");
        p.y.push_back(static_cast<int>(*v));
        continue;
      }
      const std::string_view key = tok.substr(0, eq);
      const std::string_view value = tok.substr(eq + 1);
      if (key == "loss") {
        const auto v = parse_double(value);
        if (!v) throw ParseError(line_no, "bad loss");
        p.loss = *v;
        has_loss = true;
      } else if (key == "states") {
        const auto v = parse_int(value);
        if (!v || *v < 0) throw ParseError(line_no, "bad states");
        p.states = static_cast<std::uint64_t>(*v);
        has_states = true;
      } else if (key == "status") {
        const auto v = parse_status(value);
        if (!v) throw ParseError(line_no, "bad status");
        p.status = *v;
        has_status = true;
      } else {
        throw ParseError(line_no, "unknown field '" + std::string(key) + "'");
      }
    }
    if (p.y.empty()) throw ParseError(line_no, "prediction has no labels");
    if (!has_loss || !has_states || !has_status) throw ParseError(line_no, "missing loss/states/status field");
    if (!lines.empty() && lines.front().y.size() != p.y.size()) throw ParseError(line_no, "label count changes");
    lines.push_back(std::move(p));
  }
  return lines;
}

}  // namespace lmsbn
