#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bspn/chain.hpp"
#include "bspn/dataio.hpp"
#include "bspn/diagnostics.hpp"
#include "bspn/errors.hpp"
#include "bspn/inference.hpp"
#include "bspn/model.hpp"
#include "bspn/tuning.hpp"
#include "json.hpp"

namespace bspn::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Non-finite likelihoods or similar numeric breakdowns.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// Flag combinations CLI11 cannot express on its own.
class UsageError : public Error {
 public:
  using Error::Error;
};

double finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericFailure(std::string(what) + " is not finite");
  return v;
}

// ---------------------------------------------------------------- file formats

json columns_to_json(const std::vector<ColumnInfo>& cols) {
  json a = json::array();
  for (const auto& c : cols)
    a.push_back({{"name", c.name}, {"kind", std::string(column_kind_name(c.kind))}, {"categories", c.category_values}});
  return a;
}

std::vector<ColumnInfo> columns_from_json(const json& a) {
  std::vector<ColumnInfo> cols;
  for (const auto& c : a)
    cols.push_back({c.at("name").get<std::string>(), parse_column_kind(c.at("kind").get<std::string>()),
                    c.at("categories").get<std::vector<double>>()});
  return cols;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

Model read_model(const fs::path& p) { return deserialize_model(read_file_bytes(p)); }

void write_model(const fs::path& p, const Model& m) { write_file_bytes(p, serialize_model(m)); }

Dataset load_data(const std::string& path, const std::string& schema_path,
                  const std::vector<ColumnInfo>* reference = nullptr) {
  Schema schema;
  LoadOptions o;
  if (!schema_path.empty()) {
    schema = load_schema(schema_path);
    o.schema = &schema;
  }
  o.reference = reference;
  Dataset ds = load_delimited(path, o);
  if (ds.x.empty()) throw DataError(path + ": no complete rows");
  return ds;
}

// Schema file lines in order, for building without data.
std::vector<ColumnInfo> ordered_schema(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::vector<ColumnInfo> cols;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream ls(line);
    std::string name, kind;
    if (!(ls >> name)) continue;
    if (!(ls >> kind)) throw DataError(p.string() + ": missing kind for " + name);
    cols.push_back({name, parse_column_kind(kind), {}});
    if (cols.back().kind == ColumnKind::Categorical)
      throw UsageError("categorical column " + name + " needs --data to know its categories");
  }
  return cols;
}

struct RunDir {
  fs::path root;
  fs::path model() const { return root / "model.bin"; }
  fs::path config() const { return root / "config.toml"; }
  fs::path columns() const { return root / "columns.json"; }
  fs::path train() const { return root / "train.csv"; }
  fs::path heldout() const { return root / "heldout.csv"; }
  fs::path samples() const { return root / "samples"; }
  fs::path trace() const { return root / "trace.tsv"; }
  fs::path report() const { return root / "report.json"; }
};

struct LoadedRun {
  Model model;
  std::vector<ColumnInfo> columns;
  Dataset train;
  std::vector<StoredSample> samples;
  std::uint64_t seed = 1;
};

LoadedRun load_run(const RunDir& dir) {
  if (!fs::is_directory(dir.root)) throw DataError("no run directory " + dir.root.string());
  LoadedRun r;
  r.model = read_model(dir.model());
  r.columns = columns_from_json(read_json(dir.columns()));
  LoadOptions o;
  o.reference = &r.columns;
  r.train = load_delimited(dir.train(), o);
  std::vector<fs::path> files;
  if (fs::is_directory(dir.samples()))
    for (const auto& e : fs::directory_iterator(dir.samples()))
      if (e.path().extension() == ".bin") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) r.samples.push_back(read_sample_file(f));
  if (r.samples.empty()) throw DataError(dir.root.string() + ": run holds no samples");
  const json rep = read_json(dir.report());
  r.seed = rep.at("seed").get<std::uint64_t>();
  return r;
}

SubsampleRatios parse_ratios(const std::vector<double>& flag, const std::string& file, std::size_t dims) {
  SubsampleRatios r = SubsampleRatios::ones(dims);
  if (!file.empty()) r.r = read_json(file).at("best").get<std::vector<double>>();
  if (!flag.empty()) r.r = flag;
  if (r.r.size() == 1 && dims > 1) r.r.assign(dims, r.r.front());
  check_ratios(r, dims);
  return r;
}

// ---------------------------------------------------------------- commands

struct BuildOpts {
  std::size_t dims = 0, cs = 2, cp = 2;
  std::string schema, data, out;
  double alpha = 1.0;
  std::uint64_t seed = 1;
};

void cmd_build(const BuildOpts& o, std::ostream& out) {
  LeafPolicy policy;
  std::vector<ColumnInfo> cols;
  Dataset ds;
  if (!o.data.empty()) {
    ds = load_data(o.data, o.schema);
    cols = ds.columns;
  } else if (!o.schema.empty()) {
    cols = ordered_schema(o.schema);
  }
  std::size_t dims = o.dims;
  if (!cols.empty()) {
    if (dims != 0 && dims != cols.size())
      throw UsageError("--dims " + std::to_string(dims) + " disagrees with " + std::to_string(cols.size()) + " columns");
    dims = cols.size();
    policy = leaf_policy_for(cols);
  }
  if (dims == 0) throw UsageError("give --dims, --schema or --data");
  Model m = Model::with_defaults(build_balanced(dims, o.cs, o.cp, policy), o.alpha);
  if (!o.data.empty()) {
    Rng rng = make_rng(o.seed, 7);
    m.leaf_hyper = assign_leaf_hyperparams(m.graph, ds.x, SubsampleRatios::ones(dims), {}, rng);
  }
  check_model(m);
  write_model(o.out, m);
  const SizeReport s = m.graph.size_report();
  out << json{{"dims", dims}, {"sum_outdegree", o.cs}, {"product_outdegree", o.cp}, {"sums", s.sums},
              {"products", s.products}, {"leaves", s.leaves}, {"nodes", s.nodes}, {"height", s.height},
              {"breadth", s.breadth}, {"induced_trees", count_induced_trees(m.graph).str()}}
             .dump(2)
      << '\n';
}

struct FitOpts {
  std::string data, model, schema, heldout, out, sampler = "topdown", priors = "eb", ratios_file;
  std::vector<double> ratios;
  std::uint64_t iters = 100, burnin = 0, thin = 1, seed = 1;
  double alpha = 0.0, max_seconds = 0.0;
  bool no_skip = false;
};

// Effective settings as a [fit] section that --config accepts again.
std::string fit_config(const FitOpts& o) {
  std::ostringstream s;
  s.precision(17);
  const auto str = [&](const char* key, const std::string& v) {
    if (!v.empty()) s << key << "=\"" << v << "\"\n";
  };
  s << "[fit]\n";
  str("data", o.data);
  str("model", o.model);
  str("schema", o.schema);
  str("heldout", o.heldout);
  str("sampler", o.sampler);
  s << "iters=" << o.iters << "\nburnin=" << o.burnin << "\nthin=" << o.thin << "\nseed=" << o.seed << '\n';
  if (o.alpha > 0.0) s << "alpha=" << o.alpha << '\n';
  s << "max-seconds=" << o.max_seconds << '\n';
  str("priors", o.priors);
  if (!o.ratios.empty()) {
    s << "ratios=[";
    for (std::size_t d = 0; d < o.ratios.size(); ++d) s << (d ? "," : "") << o.ratios[d];
    s << "]\n";
  }
  str("ratios-file", o.ratios_file);
  s << "no-skip=" << (o.no_skip ? "true" : "false") << '\n';
  str("out", o.out);
  return s.str();
}

void cmd_fit(const FitOpts& o, std::ostream& out) {
  const RunDir dir{o.out};
  const Dataset train = load_data(o.data, o.schema);
  Model m = read_model(o.model);
  if (m.graph.dims() != train.x.cols())
    throw DataError(o.data + " has " + std::to_string(train.x.cols()) + " columns, model expects " +
                    std::to_string(m.graph.dims()));
  if (o.alpha > 0.0) m.alpha = o.alpha;
  if (o.priors == "eb") {
    Rng rng = make_rng(o.seed, 7);
    m.leaf_hyper = assign_leaf_hyperparams(m.graph, train.x, parse_ratios(o.ratios, o.ratios_file, m.graph.dims()),
                                           {}, rng);
  } else if (!o.ratios.empty() || !o.ratios_file.empty()) {
    throw UsageError("--ratios only applies with --priors eb");
  }
  check_model(m);
  Dataset held;
  if (!o.heldout.empty()) held = load_data(o.heldout, "", &train.columns);

  RunConfig cfg;
  cfg.iterations = o.iters;
  cfg.burn_in = o.burnin;
  cfg.thin = o.thin;
  cfg.seed = o.seed;
  cfg.max_seconds = o.max_seconds;
  check_run_config(cfg);
  const SamplerKind kind = parse_sampler(o.sampler);
  const ChainResult res = run(kind, m, train.x, cfg, TopDownOptions{.skip_unchanged_dims = !o.no_skip});

  fs::create_directories(dir.samples());
  for (const auto& e : fs::directory_iterator(dir.samples())) fs::remove(e.path());
  write_model(dir.model(), m);
  write_json(dir.columns(), columns_to_json(train.columns));
  write_delimited(dir.train(), train);
  if (!o.heldout.empty()) write_delimited(dir.heldout(), held);
  {
    std::ofstream cfg_out(dir.config());
    cfg_out << fit_config(o);
  }
  char name[32];
  for (std::size_t k = 0; k < res.samples.size(); ++k) {
    std::snprintf(name, sizeof name, "%06zu.bin", k);
    write_sample_file(dir.samples() / name, res.samples[k]);
  }
  std::ofstream tr(dir.trace());
  tr << "iteration\tseconds\telapsed\tlog_joint\tacceptance_rate\tnode_touches\tskipped_dims\n";
  tr.precision(17);
  double acc = 0.0;
  for (const auto& row : res.trace) {
    tr << row.iteration << '\t' << row.seconds << '\t' << row.elapsed << '\t' << row.log_joint << '\t'
       << row.acceptance_rate << '\t' << row.node_touches << '\t' << row.skipped_dims << '\n';
    acc += row.acceptance_rate;
  }
  const json rep{{"sampler", std::string(sampler_name(kind))},
                 {"seed", o.seed},
                 {"sweeps", res.trace.size()},
                 {"samples", res.samples.size()},
                 {"total_seconds", res.total_seconds},
                 {"stopped_by_time", res.stopped_by_time},
                 {"mean_acceptance", res.trace.empty() ? 0.0 : acc / static_cast<double>(res.trace.size())},
                 {"final_log_joint", res.trace.empty() ? 0.0 : res.trace.back().log_joint},
                 {"train_rows", train.x.rows()},
                 {"dropped_rows", train.dropped_rows}};
  write_json(dir.report(), rep);
  out << rep.dump(2) << '\n';
}

struct EvalOpts {
  std::string run, data, out;
  std::uint64_t seed = 0;
};

void cmd_eval(const EvalOpts& o, std::ostream& out) {
  const LoadedRun r = load_run({o.run});
  const Dataset test = load_data(o.data, "", &r.columns);
  const auto ll = test_log_likelihood(r.model, r.train.x, r.samples, test.x, o.seed ? o.seed : r.seed);
  finite(ll.posterior_mean, "posterior-mean log-likelihood");
  const json rep{{"test_rows", test.x.rows()},
                 {"samples", r.samples.size()},
                 {"posterior_mean", ll.posterior_mean},
                 {"final_sample", ll.final_sample},
                 {"per_sample", ll.per_sample}};
  if (!o.out.empty()) write_json(o.out, rep);
  out << rep.dump(2) << '\n';
}

struct TuneOpts {
  std::string data, val, schema, out, sampler = "topdown";
  std::size_t trials = 20, cs = 2, cp = 2;
  std::uint64_t iters = 75, burnin = 25, thin = 5, seed = 1;
  double alpha = 1.0, r_min = 0.01;
  unsigned jobs = 1;
};

void cmd_tune(const TuneOpts& o, std::ostream& out) {
  const Dataset train = load_data(o.data, o.schema);
  const Dataset val = load_data(o.val, "", &train.columns);
  const SpnGraph g = build_balanced(train.x.cols(), o.cs, o.cp, leaf_policy_for(train.columns));
  TuneConfig cfg;
  cfg.trials = o.trials;
  cfg.r_min = o.r_min;
  cfg.sampler = parse_sampler(o.sampler);
  cfg.run.iterations = o.iters;
  cfg.run.burn_in = o.burnin;
  cfg.run.thin = o.thin;
  cfg.alpha = o.alpha;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  const TuneResult res = search_ratios(g, train.x, val.x, cfg);
  json trials = json::array();
  for (const auto& t : res.trials)
    trials.push_back({{"index", t.index}, {"ratios", t.ratios.r}, {"score", t.score}, {"seed", t.seed},
                      {"seconds", t.seconds}});
  const json rep{{"best_index", res.best_index},
                 {"best", res.best.r},
                 {"best_score", finite(res.trials[res.best_index].score, "best validation score")},
                 {"trials", trials}};
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_json(fs::path(o.out) / "tune.json", rep);
    std::ofstream log(fs::path(o.out) / "trials.tsv");
    log.precision(17);
    log << "index\tseed\tseconds\tscore";
    for (std::size_t d = 0; d < train.x.cols(); ++d) log << "\tr" << d;
    log << '\n';
    for (const auto& t : res.trials) {
      log << t.index << '\t' << t.seed << '\t' << t.seconds << '\t' << t.score;
      for (double v : t.ratios.r) log << '\t' << v;
      log << '\n';
    }
  }
  out << rep.dump(2) << '\n';
}

struct BenchOpts {
  std::string data, schema, samplers = "both";
  std::vector<std::size_t> cs_list{2, 4};
  std::size_t cp = 2, iters = 10, warmup = 1;
  std::uint64_t seed = 1;
};

void cmd_bench(const BenchOpts& o, std::ostream& out) {
  const Dataset ds = load_data(o.data, o.schema);
  std::vector<SamplerKind> kinds;
  if (o.samplers == "both")
    kinds = {SamplerKind::BottomUp, SamplerKind::TopDown};
  else
    kinds = {parse_sampler(o.samplers)};
  if (o.iters == 0) throw UsageError("--iters must be positive");
  out << "cs\tsampler\tsums\tnodes\tmean_seconds\tstd_seconds\ttouches_per_point\tspeedup\n";
  for (std::size_t cs : o.cs_list) {
    const SpnGraph g = build_balanced(ds.x.cols(), cs, o.cp, leaf_policy_for(ds.columns));
    Model m{g, {}, 1.0};
    Rng prior_rng = make_rng(o.seed, 7);
    m.leaf_hyper = assign_leaf_hyperparams(m.graph, ds.x, SubsampleRatios::ones(ds.x.cols()), {}, prior_rng);
    Rng init = make_rng(o.seed, 1);
    const LatentState start = LatentState::random(m, ds.x, init);
    std::vector<TimingReport> reps;
    for (SamplerKind k : kinds) {
      Rng rng = make_rng(o.seed, 2);
      auto s = make_sampler(k, start);
      for (std::size_t i = 0; i < o.warmup; ++i) s->sweep(rng);
      reps.push_back(timing_harness(*s, rng, o.iters));
    }
    const SizeReport sz = g.size_report();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      out << cs << '\t' << sampler_name(kinds[i]) << '\t' << sz.sums << '\t' << sz.nodes << '\t' << reps[i].mean
          << '\t' << reps[i].stddev << '\t' << reps[i].touches_per_point() << '\t';
      // Relative to the first listed sampler (bottom-up when both run).
      if (kinds.size() > 1)
        out << speedup(reps[0], reps[i]) << '\n';
      else
        out << "1\n";
    }
  }
}

struct EssOpts {
  std::string run, statistic = "heldout", data;
  std::uint64_t seed = 0;
};

void cmd_ess(const EssOpts& o, std::ostream& out) {
  const RunDir dir{o.run};
  const LoadedRun r = load_run(dir);
  std::vector<double> trace;
  if (o.statistic == "joint") {
    trace = trace_statistic(TraceStatistic::TrainJointLL, r.model, r.train.x, r.samples);
  } else if (o.statistic == "heldout") {
    std::string path = o.data;
    if (path.empty()) {
      if (!fs::exists(dir.heldout())) throw UsageError("run has no held-out data; pass --data");
      path = dir.heldout().string();
    }
    const Dataset held = load_data(path, "", &r.columns);
    trace = trace_statistic(TraceStatistic::HeldoutLL, r.model, r.train.x, r.samples, &held.x,
                            o.seed ? o.seed : r.seed);
  } else {
    throw UsageError("--statistic must be heldout or joint");
  }
  for (double v : trace) finite(v, "trace statistic");
  const EssResult e = effective_sample_size(trace);
  out << json{{"statistic", o.statistic}, {"samples", trace.size()},        {"ess", e.ess},
              {"lags", e.lags},           {"degenerate", e.degenerate}, {"negative_correlation", e.negative_correlation}}
             .dump(2)
      << '\n';
}

struct SplitOpts {
  std::string data, schema, out = ".";
  std::vector<double> ratios{8, 1, 1};
  std::uint64_t seed = 1;
};

void cmd_split(const SplitOpts& o, std::ostream& out) {
  const Dataset ds = load_data(o.data, o.schema);
  if (o.ratios.size() != 3) throw UsageError("--ratios takes three values");
  const SplitResult s = split(ds, {o.ratios[0], o.ratios[1], o.ratios[2]}, o.seed);
  fs::create_directories(o.out);
  write_delimited(fs::path(o.out) / "train.csv", s.train);
  write_delimited(fs::path(o.out) / "val.csv", s.val);
  write_delimited(fs::path(o.out) / "test.csv", s.test);
  out << json{{"train", s.train.x.rows()}, {"val", s.val.x.rows()}, {"test", s.test.x.rows()},
              {"dropped_rows", ds.dropped_rows}}
             .dump(2)
      << '\n';
}

struct FilterOpts {
  std::string data, schema, out;
  std::size_t k = 5;
  double q = 0.99;
};

void cmd_filter(const FilterOpts& o, std::ostream& out) {
  const Dataset ds = load_data(o.data, o.schema);
  const FilterResult f = knn_outlier_filter(ds, o.k, o.q);
  if (!o.out.empty()) write_delimited(o.out, f.kept);
  out << json{{"kept", f.kept.x.rows()}, {"removed", f.removed}, {"threshold", f.threshold}}.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian sum-product networks: build, fit, evaluate and tune"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML config; sections named after subcommands")->envname("BSPN_CONFIG");

  BuildOpts bo;
  auto* build = app.add_subcommand("build", "Construct an untrained model and print its size report");
  build->add_option("--dims", bo.dims, "Number of dimensions (optional with --schema or --data)");
  build->add_option("--cs", bo.cs, "Sum node outdegree")->check(CLI::Range(1, 65535));
  build->add_option("--cp", bo.cp, "Product node outdegree")->check(CLI::Range(2, 1 << 20));
  build->add_option("--schema", bo.schema, "Column kind overrides")->check(CLI::ExistingFile);
  build->add_option("--data", bo.data, "Data file for column kinds and empirical-Bayes priors")->check(CLI::ExistingFile);
  build->add_option("--alpha", bo.alpha, "Dirichlet concentration");
  build->add_option("--seed", bo.seed, "Seed");
  build->add_option("--out", bo.out, "Model file")->required();

  FitOpts fo;
  auto* fit = app.add_subcommand("fit", "Run a sampler and store thinned samples in a run directory");
  fit->add_option("--data", fo.data, "Training data")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", fo.model, "Model file from build")->required()->check(CLI::ExistingFile);
  fit->add_option("--schema", fo.schema, "Column kind overrides")->check(CLI::ExistingFile);
  fit->add_option("--heldout", fo.heldout, "Held-out data kept with the run for ess")->check(CLI::ExistingFile);
  fit->add_option("--sampler", fo.sampler, "topdown or bottomup")->check(CLI::IsMember({"topdown", "bottomup"}));
  fit->add_option("--iters", fo.iters, "Sweeps");
  fit->add_option("--burnin", fo.burnin, "Sweeps discarded before storing");
  fit->add_option("--thin", fo.thin, "Store every thin-th sweep");
  fit->add_option("--alpha", fo.alpha, "Override the model's Dirichlet concentration");
  fit->add_option("--seed", fo.seed, "Seed");
  fit->add_option("--max-seconds", fo.max_seconds, "Stop once the chain has run this long; 0 disables");
  fit->add_option("--priors", fo.priors, "eb: fit leaf priors on the training data; model: keep stored priors")
      ->check(CLI::IsMember({"eb", "model"}));
  fit->add_option("--ratios", fo.ratios, "Subsampling ratios, one per dimension or one for all")->delimiter(',');
  fit->add_option("--ratios-file", fo.ratios_file, "tune.json whose best ratios to use")->check(CLI::ExistingFile);
  fit->add_flag("--no-skip", fo.no_skip, "Evaluate unchanged dimensions in the top-down acceptance ratio");
  fit->add_option("--out", fo.out, "Run directory")->required();

  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "Test log-likelihood of a run");
  eval->add_option("--run", eo.run, "Run directory")->required();
  eval->add_option("--data", eo.data, "Test data")->required()->check(CLI::ExistingFile);
  eval->add_option("--seed", eo.seed, "Parameter draw seed; 0 uses the run seed");
  eval->add_option("--out", eo.out, "Also write the report here");

  TuneOpts to;
  auto* tune = app.add_subcommand("tune", "Random search over per-dimension subsampling ratios");
  tune->add_option("--data", to.data, "Training data")->required()->check(CLI::ExistingFile);
  tune->add_option("--val", to.val, "Validation data")->required()->check(CLI::ExistingFile);
  tune->add_option("--schema", to.schema, "Column kind overrides")->check(CLI::ExistingFile);
  tune->add_option("--trials", to.trials, "Trials, the first being all ratios 1");
  tune->add_option("--cs", to.cs, "Sum node outdegree");
  tune->add_option("--cp", to.cp, "Product node outdegree");
  tune->add_option("--sampler", to.sampler, "Sampler of the scoring chains")
      ->check(CLI::IsMember({"topdown", "bottomup"}));
  tune->add_option("--iters", to.iters, "Sweeps per trial");
  tune->add_option("--burnin", to.burnin, "Burn-in per trial");
  tune->add_option("--thin", to.thin, "Thinning per trial");
  tune->add_option("--alpha", to.alpha, "Dirichlet concentration");
  tune->add_option("--r-min", to.r_min, "Smallest ratio proposed");
  tune->add_option("--jobs", to.jobs, "Worker threads");
  tune->add_option("--seed", to.seed, "Seed");
  tune->add_option("--out", to.out, "Directory for tune.json and trials.tsv");

  BenchOpts bno;
  auto* bench = app.add_subcommand("bench", "Per-sweep timing of the samplers across sum outdegrees");
  bench->add_option("--data", bno.data, "Data")->required()->check(CLI::ExistingFile);
  bench->add_option("--schema", bno.schema, "Column kind overrides")->check(CLI::ExistingFile);
  bench->add_option("--cs-list", bno.cs_list, "Comma-separated sum outdegrees")->delimiter(',');
  bench->add_option("--cp", bno.cp, "Product node outdegree");
  bench->add_option("--samplers", bno.samplers, "both, topdown or bottomup")
      ->check(CLI::IsMember({"both", "topdown", "bottomup"}));
  bench->add_option("--iters", bno.iters, "Timed sweeps per sampler");
  bench->add_option("--warmup", bno.warmup, "Untimed sweeps first");
  bench->add_option("--seed", bno.seed, "Seed");

  EssOpts so;
  auto* ess = app.add_subcommand("ess", "Effective sample size of a run's stored samples");
  ess->add_option("--run", so.run, "Run directory")->required();
  ess->add_option("--statistic", so.statistic, "heldout or joint")->check(CLI::IsMember({"heldout", "joint"}));
  ess->add_option("--data", so.data, "Held-out data (default: the run's copy)")->check(CLI::ExistingFile);
  ess->add_option("--seed", so.seed, "Parameter draw seed; 0 uses the run seed");

  SplitOpts spo;
  auto* sp = app.add_subcommand("split", "Shuffle and split into train.csv, val.csv and test.csv");
  sp->add_option("--data", spo.data, "Data")->required()->check(CLI::ExistingFile);
  sp->add_option("--schema", spo.schema, "Column kind overrides")->check(CLI::ExistingFile);
  sp->add_option("--ratios", spo.ratios, "Three comma-separated weights")->delimiter(',');
  sp->add_option("--seed", spo.seed, "Seed");
  sp->add_option("--out", spo.out, "Output directory");

  FilterOpts flo;
  auto* flt = app.add_subcommand("filter", "Remove k-nearest-neighbour outliers");
  flt->add_option("--data", flo.data, "Data")->required()->check(CLI::ExistingFile);
  flt->add_option("--schema", flo.schema, "Column kind overrides")->check(CLI::ExistingFile);
  flt->add_option("--k", flo.k, "Neighbours");
  flt->add_option("--q", flo.q, "Score quantile above which rows are removed");
  flt->add_option("--out", flo.out, "Write the kept rows here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*build) cmd_build(bo, out);
    if (*fit) cmd_fit(fo, out);
    if (*eval) cmd_eval(eo, out);
    if (*tune) cmd_tune(to, out);
    if (*bench) cmd_bench(bno, out);
    if (*ess) cmd_ess(so, out);
    if (*sp) cmd_split(spo, out);
    if (*flt) cmd_filter(flo, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const BookkeepingError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    // Data, parse, support and I/O problems.
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace bspn::cli
