#include "dsfusion/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <vector>

#include "dsfusion/dataset.hpp"
#include "dsfusion/errors.hpp"
#include "dsfusion/evaluation.hpp"
#include "dsfusion/fusion_classifier.hpp"
#include "dsfusion/kernels.hpp"
#include "dsfusion/knn.hpp"
#include "dsfusion/model_io.hpp"

namespace dsfusion {

namespace {

// Thrown for bad flag combinations the option parser cannot see.
struct UsageError : InvalidConfig {
  using InvalidConfig::InvalidConfig;
};

struct Options {
  std::string data;
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  std::size_t repeats = 100;
  std::optional<double> train_fraction;
  std::string method = "fusion-proposed";
  std::size_t k = 24;
  std::string metric = "euclidean";
  bool scale = false;
  int max_components = 3;
  int inner_folds = 5;
  double em_tol = 3e-3;
  int em_min_iters = 10;
  int em_max_iters = 2000;
  std::string out;
  std::string model;
  std::string dump_runs;
  bool record_time = false;
  std::string delimiter = ",";
  bool no_header = false;
  int label_column = -1;
  bool unlabeled = false;
  std::string isa;
};

const std::vector<std::string> kMethods = {"fusion-proposed", "fusion-baseline", "fusion-single", "knn",
                                           "wknn",            "eknn",            "beknn"};

bool is_fusion(const std::string& m) { return m.rfind("fusion-", 0) == 0; }

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "CSV file, class label in the last column by default")->required();
  cmd->add_option("--delimiter", o.delimiter, "field separator; 'tab' for tabs");
  cmd->add_flag("--no-header", o.no_header, "first line is data");
  cmd->add_option("--label-column", o.label_column, "0-based label column, negative counts from the end");
}

void add_fusion_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-components", o.max_components, "largest mixture size tried");
  cmd->add_option("--em-tol", o.em_tol, "EM relative log-likelihood tolerance");
  cmd->add_option("--em-min-iters", o.em_min_iters, "EM minimum iterations");
  cmd->add_option("--em-max-iters", o.em_max_iters, "EM maximum iterations");
}

void add_eval_options(CLI::App* cmd, Options& o) {
  add_data_options(cmd, o);
  add_fusion_options(cmd, o);
  cmd->add_option("--seed", o.seed, "seed of all partitions");
  cmd->add_option("--folds", o.folds, "outer cross-validation folds");
  cmd->add_option("--repeats", o.repeats, "protocol repetitions");
  cmd->add_option("--train-fraction", o.train_fraction, "use repeated stratified splits instead of k-fold");
  cmd->add_option("--inner-folds", o.inner_folds, "folds of the component-selection cross-validation");
  cmd->add_option("--k", o.k, "neighbours for the knn family");
  cmd->add_option("--metric", o.metric, "euclidean | manhattan");
  cmd->add_flag("--scale", o.scale, "min-max scale features for the knn family");
  cmd->add_option("--out", o.out, "append the report row to this CSV file");
  cmd->add_option("--dump-runs", o.dump_runs, "write per-run accuracies to this CSV file");
  cmd->add_flag("--record-time", o.record_time, "put wall-clock seconds in the CSV row instead of NA");
}

CsvOptions csv_options(const Options& o) {
  CsvOptions c;
  if (o.delimiter == "tab" || o.delimiter == "\\t") {
    c.delimiter = '\t';
  } else if (o.delimiter.size() == 1) {
    c.delimiter = o.delimiter[0];
  } else {
    throw UsageError("--delimiter must be a single character or 'tab'");
  }
  c.header = !o.no_header;
  c.label_column = o.label_column;
  c.labeled = !o.unlabeled;
  return c;
}

EmConfig em_config(const Options& o) {
  EmConfig em;
  em.tol = o.em_tol;
  em.min_iters = o.em_min_iters;
  em.max_iters = o.em_max_iters;
  em.validate();
  return em;
}

FusionConfig fusion_config(const Options& o) {
  FusionConfig cfg;
  cfg.max_components = o.method == "fusion-single" ? 1 : o.max_components;
  if (o.max_components < 1) throw UsageError("--max-components must be at least 1");
  cfg.inner_folds = o.inner_folds;
  cfg.em = em_config(o);
  cfg.bpa_mode = o.method == "fusion-baseline" ? BpaMode::baseline : BpaMode::proposed;
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

FitPredict method_for(const Options& o, std::size_t n_classes) {
  if (is_fusion(o.method)) return fusion_method(fusion_config(o));
  KnnConfig cfg;
  cfg.k = o.k;
  cfg.variant = *parse_knn_variant(o.method);
  const auto metric = parse_metric(o.metric);
  if (!metric) throw UsageError("unknown metric '" + o.metric + "'");
  cfg.metric = *metric;
  cfg.minmax_scale = o.scale;
  cfg.validate(n_classes);
  return knn_method(cfg);
}

Protocol protocol_for(const Options& o) {
  Protocol p = o.train_fraction ? Protocol::fraction(*o.train_fraction, o.repeats, o.seed)
                                : Protocol::kfold(o.folds, o.repeats, o.seed);
  p.validate();
  return p;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct RunReport {
  std::string dataset;
  std::string method;
  std::string protocol;
  std::size_t repeats;
  EvalResult result;
  double seconds;
  std::uint64_t seed;
};

RunReport run_eval(const Options& o, const Dataset& data) {
  const auto method = method_for(o, data.classes());
  const auto protocol = protocol_for(o);
  const auto t0 = std::chrono::steady_clock::now();
  auto result = evaluate(method, data, protocol);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return {data.name(), o.method, protocol.describe(), protocol.repeats, std::move(result), dt.count(), o.seed};
}

std::string csv_row(const RunReport& r, bool record_time) {
  return r.dataset + "," + r.method + "," + r.protocol + "," + std::to_string(r.repeats) + "," +
         fmt("%.6f", r.result.mean) + "," + fmt("%.6f", r.result.stddev) + "," +
         (record_time ? fmt("%.3f", r.seconds) : std::string("NA")) + "," + std::to_string(r.seed);
}

void append_report(const std::string& path, const std::vector<RunReport>& reports, bool record_time) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error("cannot open report file: " + path);
  if (fresh) f << "dataset,method,protocol,repeats,mean_acc,std_acc,seconds,seed\n";
  for (const auto& r : reports) f << csv_row(r, record_time) << '\n';
}

void dump_runs(const std::string& path, const std::vector<RunReport>& reports) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open runs file: " + path);
  f << "dataset,method,run,accuracy\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.result.run_accuracies.size(); ++i) {
      f << r.dataset << ',' << r.method << ',' << i << ',' << fmt("%.6f", r.result.run_accuracies[i]) << '\n';
    }
  }
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

std::vector<std::string> report_cells(const std::string& label, const RunReport& r) {
  std::vector<std::string> cells;
  if (!label.empty()) cells.push_back(label);
  cells.insert(cells.end(), {r.dataset, r.method, r.protocol, std::to_string(r.repeats),
                             fmt("%.2f", 100.0 * r.result.mean), fmt("%.2f", 100.0 * r.result.stddev),
                             fmt("%.2f", r.seconds)});
  if (r.result.unclassified > 0) cells.push_back(std::to_string(r.result.unclassified) + " in total conflict");
  return cells;
}

void finish_reports(const Options& o, std::ostream& out, const std::vector<RunReport>& reports, bool labelled) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"dataset", "method", "protocol", "repeats", "mean_acc%", "std_acc%", "seconds"};
  if (labelled) head.insert(head.begin(), "experiment");
  rows.push_back(head);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    rows.push_back(report_cells(labelled ? "Exp" + std::to_string(i + 1) : "", reports[i]));
  }
  print_table(out, rows);
  if (!o.out.empty()) append_report(o.out, reports, o.record_time);
  if (!o.dump_runs.empty()) dump_runs(o.dump_runs, reports);
}

int cmd_train(const Options& o, std::ostream& out) {
  if (!is_fusion(o.method)) throw UsageError("train only supports the fusion methods");
  const auto data = load_csv(o.data, csv_options(o));
  FusionConfig cfg = fusion_config(o);
  cfg.inner_folds = static_cast<int>(o.folds);
  cfg.validate();
  const auto result = train(data, cfg);
  const auto& rep = result.report;

  out << "component selection: " << data.name() << ", " << cfg.inner_folds << "-fold, seed " << o.seed << '\n';
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"set"};
  for (int y : rep.candidates) head.push_back(y == 1 ? "single" : std::to_string(y) + " components");
  rows.push_back(head);
  for (std::size_t g = 0; g < rep.fold_bias.size(); ++g) {
    std::vector<std::string> row = {"set " + std::to_string(g + 1)};
    for (double b : rep.fold_bias[g]) row.push_back(fmt("%.4f", b));
    rows.push_back(row);
  }
  std::vector<std::string> sum = {"sum"};
  for (double b : rep.total_bias) sum.push_back(fmt("%.4f", b));
  rows.push_back(sum);
  print_table(out, rows);
  out << "chosen components: " << rep.chosen_components << '\n';
  if (rep.conflicts > 0) out << "validation samples in total conflict: " << rep.conflicts << '\n';

  const std::string path = o.model.empty() ? data.name() + ".model" : o.model;
  save_model(result.classifier, std::filesystem::path(path));
  out << "model written to " << path << '\n';
  return 0;
}

int cmd_predict(const Options& o, std::ostream& out) {
  if (o.model.empty()) throw UsageError("predict needs --model");
  const auto clf = load_model(std::filesystem::path(o.model));
  const auto data = load_csv(o.data, csv_options(o));
  if (data.cols() != clf.attribute_count()) {
    throw UsageError("data has " + std::to_string(data.cols()) + " attributes, model expects " +
                     std::to_string(clf.attribute_count()));
  }
  const auto& frame = clf.frame();
  out << "row,predicted";
  for (const auto& l : frame.labels()) out << ",betp_" << l;
  if (!o.unlabeled) out << ",actual";
  out << '\n';
  std::size_t hits = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out << r << ',';
    std::optional<std::size_t> cls;
    try {
      const auto p = predict(clf, data.row(r));
      cls = p.cls;
      out << frame.label(p.cls);
      for (double b : p.betp) out << ',' << fmt("%.6f", b);
    } catch (const TotalConflict&) {
      out << "conflict";
      for (std::size_t i = 0; i < frame.size(); ++i) out << ",NA";
    }
    if (!o.unlabeled) {
      const auto& actual = data.frame().label(data.label(r));
      out << ',' << actual;
      if (cls && frame.label(*cls) == actual) ++hits;
    }
    out << '\n';
  }
  if (!o.unlabeled) {
    out << "accuracy: " << fmt("%.2f", 100.0 * static_cast<double>(hits) / static_cast<double>(data.rows()))
        << "%\n";
  }
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto data = load_csv(o.data, csv_options(o));
  finish_reports(o, out, {run_eval(o, data)}, false);
  return 0;
}

int cmd_ablate(Options o, std::ostream& out) {
  const auto data = load_csv(o.data, csv_options(o));
  std::vector<RunReport> reports;
  for (const char* m : {"fusion-single", "fusion-baseline", "fusion-proposed"}) {
    o.method = m;
    reports.push_back(run_eval(o, data));
  }
  finish_reports(o, out, reports, true);
  return 0;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribute-fusion evidential classifiers"};
  app.name("dsfusion");
  app.require_subcommand(1);
  Options o;
  app.add_option("--isa", o.isa, "kernel variant: scalar | avx2 (default: best available)");

  auto* train_cmd = app.add_subcommand("train", "fit membership functions and write a model file");
  add_data_options(train_cmd, o);
  add_fusion_options(train_cmd, o);
  train_cmd->add_option("--seed", o.seed, "seed of the cross-validation partition");
  train_cmd->add_option("--folds", o.folds, "folds of the component-selection cross-validation");
  train_cmd->add_option("--method", o.method, "fusion-proposed | fusion-baseline | fusion-single")
      ->check(CLI::IsMember({"fusion-proposed", "fusion-baseline", "fusion-single"}));
  train_cmd->add_option("--model", o.model, "model output path (default <dataset>.model)");

  auto* predict_cmd = app.add_subcommand("predict", "classify the rows of a CSV file with a saved model");
  add_data_options(predict_cmd, o);
  predict_cmd->add_option("--model", o.model, "model file")->required();
  predict_cmd->add_flag("--unlabeled", o.unlabeled, "the file has no label column");

  auto* eval_cmd = app.add_subcommand("eval", "estimate accuracy by repeated cross-validation or splits");
  add_eval_options(eval_cmd, o);
  eval_cmd->add_option("--method", o.method, "method id")->check(CLI::IsMember(kMethods));

  auto* ablate_cmd = app.add_subcommand("ablate", "single Gaussian vs. baseline BPA vs. proposed, on one dataset");
  add_eval_options(ablate_cmd, o);

  try {
    std::vector<std::string> argv(args.rbegin(), args.rend());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!o.isa.empty()) {
      const auto isa = kernels::parse_isa(o.isa);
      if (!isa) throw UsageError("unknown --isa '" + o.isa + "'");
      kernels::select(*isa);
    }
    if (*train_cmd) return cmd_train(o, out);
    if (*predict_cmd) return cmd_predict(o, out);
    if (*eval_cmd) return cmd_eval(o, out);
    if (*ablate_cmd) return cmd_ablate(o, out);
  } catch (const FileNotFound& e) {
    err << "dsfusion: " << e.what() << '\n';
    return 2;
  } catch (const InvalidConfig& e) {
    err << "dsfusion: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "dsfusion: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dsfusion
