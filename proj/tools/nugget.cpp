// Command-line front end: dataset generation, training, evaluation,
// baselines, spectral diagnostics, ablations and gradient checks.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
// error. Failures print one line to stderr:
//   nugget: error kind=<usage|config|data|numerical> code=<n> message="<text>"

#include <CLI11.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nugget/analysis.hpp"
#include "nugget/baselines.hpp"
#include "nugget/checkpoint.hpp"
#include "nugget/dataset.hpp"
#include "nugget/errors.hpp"
#include "nugget/log.hpp"
#include "nugget/metrics.hpp"
#include "nugget/model.hpp"
#include "nugget/parallel.hpp"
#include "nugget/train.hpp"

namespace fs = std::filesystem;
using namespace nugget;

namespace {

// ---- formatting -----------------------------------------------------------

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string show(const std::string& s) { return s; }
std::string show(double v) { return num(v); }
template <class T>
  requires std::is_integral_v<T>
std::string show(T v) {
  return std::to_string(v);
}
template <class T>
std::string show(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + show(v[i]);
  return out;
}

// ---- options and config files -----------------------------------------

// Every option is registered with a printer so the resolved configuration
// can be written back as a flat key = value file.
struct Registry {
  std::vector<std::pair<std::string, std::function<std::string()>>> items;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    items.emplace_back(name, [&var] { return show(var); });
    CLI::Option* o = app->add_option("--" + name, var, help)->capture_default_str();
    if constexpr (requires { var.push_back(var.front()); }) o->delimiter(',');
    return o;
  }

  std::string dump(const std::string& command) const {
    std::string out = "# nugget " + command + "\n";
    for (const auto& [name, f] : items) out += name + " = " + f() + "\n";
    return out;
  }
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads `key = value` lines ('#' starts a comment) into --key=value
// arguments, skipping keys already given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file);
  auto given = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(file + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (key == "config" || given(key)) continue;
    extra.push_back("--" + key + "=" + value);
  }
  // file values go right after the subcommand so explicit flags stay in place
  out.push_back(args.front());
  std::size_t i = 1;
  if (i < args.size()) out.push_back(args[i++]);
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(i), args.end());
  return out;
}

// ---- artifacts ------------------------------------------------------------

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Advisory lock held for the life of the command.
class Lock {
 public:
  explicit Lock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw IoError("cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw IoError("output is locked by another run: " + path.string());
    }
  }
  ~Lock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  Lock(const Lock&) = delete;
  Lock& operator=(const Lock&) = delete;

 private:
  int fd_ = -1;
};

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Output location of one command: the resolved config and a timestamped log
// sit next to the artifacts.
class RunDir {
 public:
  // `stem` prefixes the sidecars; for a directory run it is dir/command.
  RunDir(fs::path stem, fs::path lock_path, const std::string& command, const Registry& reg,
         const std::vector<std::string>& args)
      : stem_(std::move(stem)), lock_(lock_path), start_(std::chrono::steady_clock::now()) {
    write_text(stem_.string() + ".ini", reg.dump(command));
    log_ << "start " << timestamp() << "\ncommand";
    for (const auto& a : args) log_ << ' ' << a;
    log_ << '\n';
  }
  ~RunDir() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    log_ << "end " << timestamp() << "\nelapsed_seconds " << num(secs) << '\n';
    std::ofstream(stem_.string() + ".log", std::ios::binary) << log_.str();
  }
  void note(const std::string& line) { log_ << line << '\n'; }

 private:
  fs::path stem_;
  Lock lock_;
  std::chrono::steady_clock::time_point start_;
  std::ostringstream log_;
};

fs::path ensure_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("output directory must not be empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

std::string metrics_csv(const MetricReport& r) {
  std::string out = "graph_id,auc,accuracy\n";
  for (std::size_t i = 0; i < r.per_graph.size(); ++i)
    out += std::to_string(i) + "," + num(r.per_graph[i].auc) + "," + num(r.per_graph[i].accuracy) + "\n";
  out += "mean," + num(r.mean_auc) + "," + num(r.mean_acc) + "\n";
  out += "sem," + num(r.sem_auc) + "," + num(r.sem_acc) + "\n";
  return out;
}

std::string summary_line(const MetricReport& r) {
  return "mean_auc=" + num(r.mean_auc) + " sem_auc=" + num(r.sem_auc) + " mean_acc=" + num(r.mean_acc) +
         " sem_acc=" + num(r.sem_acc) + " graphs=" + std::to_string(r.per_graph.size());
}

// ---- shared option groups -------------------------------------------------

struct Common {
  std::string config;
  int threads = 0;
  bool verbose = false;

  void add(CLI::App* app, Registry& reg) {
    app->add_option("--config", config, "flat key = value file; flags override its values");
    reg.add(app, "threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
    app->add_flag("--verbose", verbose, "progress messages on stderr");
  }
  void apply() const {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    log::set_level(verbose ? log::Level::Info : log::Level::Warning);
  }
};

struct GraphOpts {
  std::string graph = "ba";
  std::size_t n = 20;
  double p = 0.2;
  std::size_t ws_k = 0;
  std::size_t m = 1;

  void add(CLI::App* app, Registry& reg) {
    reg.add(app, "graph", graph, "graph model: er, ws or ba")->check(CLI::IsMember({"er", "ws", "ba"}));
    reg.add(app, "n", n, "nodes");
    reg.add(app, "p", p, "ER edge or WS rewiring probability");
    reg.add(app, "ws-k", ws_k, "WS lattice degree (0: default)");
    reg.add(app, "m", m, "BA attachment count");
  }
  GraphSpec spec() const { return {parse_graph_model(graph), n, p, ws_k, m}; }
};

struct GameOpts {
  std::string game = "lq";
  double beta = 0.6;
  double alpha = 1.0;
  double bh_noise = 1.0;
  double epsilon = 0.2;

  void add(CLI::App* app, Registry& reg) {
    reg.add(app, "game", game, "game: lq, lig or bh")->check(CLI::IsMember({"lq", "lig", "bh"}));
    reg.add(app, "beta", beta, "LQ interaction strength, equal to rho(beta A)");
    reg.add(app, "alpha", alpha, "benefit smoothness in [0, 1]");
    reg.add(app, "bh-noise", bh_noise, "Barik-Honorio noise std");
    reg.add(app, "epsilon", epsilon, "Barik-Honorio epsilon");
  }
  GameSpec spec() const {
    GameSpec g{parse_game_kind(game), beta, alpha, bh_noise, epsilon};
    g.validate();
    return g;
  }
};

struct DataOpts {
  GraphOpts graph;
  GameOpts game;
  std::size_t k = 50;
  std::string norm = "maxabs";
  double noise = 0.0;
  std::vector<std::size_t> splits{850, 50, 100};
  std::uint64_t seed = 0;

  void add(CLI::App* app, Registry& reg) {
    graph.add(app, reg);
    game.add(app, reg);
    reg.add(app, "k", k, "games per sample");
    reg.add(app, "norm", norm, "action normalisation: none, maxabs or unit_l2")
        ->check(CLI::IsMember({"none", "maxabs", "unit_l2"}));
    reg.add(app, "noise", noise, "observation noise std");
    reg.add(app, "splits", splits, "train,val,test sample counts")->expected(3);
    reg.add(app, "seed", seed, "generation seed");
  }
  GenerationConfig config() const {
    GenerationConfig c;
    c.graph = graph.spec();
    c.game = game.spec();
    c.games = k;
    c.normalization = parse_action_norm(norm);
    c.noise_std = noise;
    c.train = splits.at(0);
    c.val = splits.at(1);
    c.test = splits.at(2);
    c.seed = seed;
    c.validate();
    return c;
  }
};

struct ModelOpts {
  ModelConfig cfg;
  void add(CLI::App* app, Registry& reg) {
    reg.add(app, "features", cfg.features, "F");
    reg.add(app, "key-features", cfg.key_features, "F'");
    reg.add(app, "heads", cfg.heads, "attention heads");
    reg.add(app, "phi-hidden", cfg.phi_hidden, "phi MLP width");
    reg.add(app, "psi-hidden", cfg.psi_hidden, "psi MLP width");
  }
};

struct TrainOpts {
  ModelOpts model;
  double lr = 0.001;
  std::size_t batch = 100;
  std::size_t patience = 50;
  std::size_t max_epochs = 1000;
  std::uint64_t train_seed = 0;
  std::string stop = "auc";

  void add(CLI::App* app, Registry& reg) {
    model.add(app, reg);
    reg.add(app, "lr", lr, "Adam learning rate");
    reg.add(app, "batch", batch, "minibatch size");
    reg.add(app, "patience", patience, "early-stopping patience in epochs");
    reg.add(app, "max-epochs", max_epochs, "epoch limit");
    reg.add(app, "train-seed", train_seed, "initialisation and shuffling seed");
    reg.add(app, "stop", stop, "early-stopping metric: auc or loss")->check(CLI::IsMember({"auc", "loss"}));
  }
  TrainConfig config() const {
    TrainConfig c;
    c.lr = lr;
    c.batch_size = batch;
    c.patience = patience;
    c.max_epochs = max_epochs;
    c.seed = train_seed;
    c.stop_metric = stop == "auc" ? StopMetric::ValAuc : StopMetric::ValLoss;
    c.model = model.cfg;
    c.validate();
    return c;
  }
};

TrainResult train_logged(const Dataset& ds, const TrainConfig& cfg) {
  return train(ds, cfg, [](const EpochLog& e) {
    log::info("epoch " + std::to_string(e.epoch) + " train_loss " + num(e.train_loss) + " val_loss " +
              num(e.val_loss) + " val_auc " + num(e.val_auc));
    return true;
  });
}

std::string train_log_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_loss,val_auc,val_acc\n";
  for (const auto& e : log)
    out += std::to_string(e.epoch) + "," + num(e.train_loss) + "," + num(e.val_loss) + "," + num(e.val_auc) + "," +
           num(e.val_acc) + "\n";
  return out;
}

// ---- error reporting ------------------------------------------------------

int fail(const std::string& kind, int code, std::string message) {
  for (char& c : message)
    if (c == '\n' || c == '\r') c = ' ';
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c;
  }
  std::fprintf(stderr, "nugget: error kind=%s code=%d message=\"%s\"\n", kind.c_str(), code, escaped.c_str());
  return code;
}

int run(int argc, char** argv) {
  const std::vector<std::string> raw(argv, argv + argc);
  std::vector<std::string> args = expand_config(raw);

  CLI::App app{"Network structure inference from game equilibria"};
  app.require_subcommand(1);
  app.name("nugget");

  std::map<std::string, Registry> regs;
  std::function<void()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "write a dataset of equilibrium actions");
  Common gen_common;
  DataOpts gen_data;
  std::string gen_out;
  gen_common.add(gen, regs["generate"]);
  gen_data.add(gen, regs["generate"]);
  regs["generate"].add(gen, "out", gen_out, "dataset file (JSON lines)")->required();
  gen->callback([&] {
    action = [&] {
      gen_common.apply();
      const GenerationConfig cfg = gen_data.config();
      const fs::path out(gen_out);
      if (out.has_parent_path()) ensure_dir(out.parent_path().string());
      RunDir run(out, out.string() + ".lock", "generate", regs["generate"], raw);
      const Dataset ds = generate_dataset(cfg);
      save_dataset(ds, out);
      run.note("samples " + std::to_string(ds.samples.size()));
      std::printf("samples=%zu out=%s\n", ds.samples.size(), gen_out.c_str());
    };
  });

  // train
  auto* tr = app.add_subcommand("train", "train the model and write a checkpoint and training log");
  Common tr_common;
  TrainOpts tr_opts;
  std::string tr_data, tr_out;
  tr_common.add(tr, regs["train"]);
  regs["train"].add(tr, "data", tr_data, "dataset file")->required();
  regs["train"].add(tr, "out", tr_out, "output directory")->required();
  tr_opts.add(tr, regs["train"]);
  tr->callback([&] {
    action = [&] {
      tr_common.apply();
      const TrainConfig cfg = tr_opts.config();
      const Dataset ds = load_dataset(tr_data);
      const fs::path dir = ensure_dir(tr_out);
      RunDir run(dir / "train", dir / ".lock", "train", regs["train"], raw);
      const TrainResult r = train_logged(ds, cfg);
      save_checkpoint(r.params, dir / "model.ckpt");
      write_text(dir / "train_log.csv", train_log_csv(r.log));
      const EpochLog& best = r.log.at(r.best_epoch);
      run.note("epochs " + std::to_string(r.log.size()) + " best " + std::to_string(r.best_epoch));
      std::printf("epochs=%zu best_epoch=%zu val_auc=%s val_loss=%s\n", r.log.size(), r.best_epoch,
                  num(best.val_auc).c_str(), num(best.val_loss).c_str());
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "score a checkpoint on a dataset split");
  Common ev_common;
  std::string ev_data, ev_ckpt, ev_out, ev_split = "test";
  double ev_threshold = 0.5;
  ev_common.add(ev, regs["eval"]);
  regs["eval"].add(ev, "data", ev_data, "dataset file")->required();
  regs["eval"].add(ev, "ckpt", ev_ckpt, "checkpoint file or training directory")->required();
  regs["eval"].add(ev, "out", ev_out, "output directory (default: the checkpoint's directory)");
  regs["eval"].add(ev, "split", ev_split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  regs["eval"].add(ev, "threshold", ev_threshold, "probability threshold for accuracy");
  ev->callback([&] {
    action = [&] {
      ev_common.apply();
      fs::path ckpt(ev_ckpt);
      if (fs::is_directory(ckpt)) ckpt /= "model.ckpt";
      if (ev_out.empty()) ev_out = ckpt.has_parent_path() ? ckpt.parent_path().string() : ".";
      const NuggetParams params = load_checkpoint(ckpt);
      const Dataset ds = load_dataset(ev_data);
      const Split split = parse_split(ev_split);
      if (ds.count(split) == 0) throw DataError("dataset has no " + ev_split + " samples");
      const fs::path dir = ensure_dir(ev_out);
      RunDir run(dir / "eval", dir / ".lock", "eval", regs["eval"], raw);
      const Evaluation e = evaluate_model(params, ds, split, ev_threshold);
      write_text(dir / "metrics.csv", metrics_csv(e.metrics));
      std::printf("%s mean_loss=%s\n", summary_line(e.metrics).c_str(), num(e.mean_loss).c_str());
    };
  });

  // baseline
  auto* bl = app.add_subcommand("baseline", "tune and score a baseline on a dataset");
  Common bl_common;
  std::string bl_method, bl_data, bl_out;
  std::vector<double> bl_grid = default_lambda_grid();
  bl_common.add(bl, regs["baseline"]);
  regs["baseline"].add(bl, "method", bl_method, "correlation, anticorrelation or glasso")
      ->required()
      ->check(CLI::IsMember({"correlation", "anticorrelation", "glasso"}));
  regs["baseline"].add(bl, "data", bl_data, "dataset file")->required();
  regs["baseline"].add(bl, "out", bl_out, "output directory (default: baseline_<method>)");
  regs["baseline"].add(bl, "lambdas", bl_grid, "glasso regularisation grid");
  bl->callback([&] {
    action = [&] {
      bl_common.apply();
      const BaselineMethod method = parse_baseline(bl_method);
      if (bl_out.empty()) bl_out = "baseline_" + bl_method;
      const Dataset ds = load_dataset(bl_data);
      const fs::path dir = ensure_dir(bl_out);
      RunDir run(dir / "baseline", dir / ".lock", "baseline", regs["baseline"], raw);
      const TuneResult r = tune_regularization(method, ds, bl_grid);
      std::string tuning = "lambda,val_auc\n";
      for (std::size_t i = 0; i < r.grid.size(); ++i) tuning += num(r.grid[i]) + "," + num(r.val_auc[i]) + "\n";
      write_text(dir / "tuning.csv", tuning);
      write_text(dir / "metrics.csv", metrics_csv(r.test));
      run.note("unconverged_fits " + std::to_string(r.unconverged));
      std::printf("evaluations=%zu best_lambda=%s %s\n", r.evaluations, num(r.best_lambda).c_str(),
                  summary_line(r.test).c_str());
    };
  });

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "filter responses, GFT coefficients and eigenvalue statistics");
  Common sp_common;
  GraphOpts sp_graph;
  GameOpts sp_game;
  std::size_t sp_graphs = 1000, sp_points = 201;
  std::uint64_t sp_seed = 0;
  std::string sp_out;
  sp_common.add(sp, regs["spectrum"]);
  sp_graph.add(sp, regs["spectrum"]);
  sp_game.add(sp, regs["spectrum"]);
  regs["spectrum"].add(sp, "graphs", sp_graphs, "random graphs to summarise")->check(CLI::PositiveNumber);
  regs["spectrum"].add(sp, "points", sp_points, "eigenvalue grid points for the filter response")
      ->check(CLI::Range(2, 100000));
  regs["spectrum"].add(sp, "seed", sp_seed, "graph seed");
  regs["spectrum"].add(sp, "out", sp_out, "output directory")->required();
  sp->callback([&] {
    action = [&] {
      sp_common.apply();
      const GraphSpec graph = sp_graph.spec();
      const GameSpec game = sp_game.spec();
      const fs::path dir = ensure_dir(sp_out);
      RunDir run(dir / "spectrum", dir / ".lock", "spectrum", regs["spectrum"], raw);

      Vector grid(sp_points);
      for (std::size_t i = 0; i < sp_points; ++i)
        grid[i] = 1.0 - 2.0 * static_cast<double>(i) / static_cast<double>(sp_points - 1);
      const FilterResponse f = filter_response(game, grid);
      std::string fr = "eigenvalue,response\n";
      for (std::size_t i = 0; i < f.eigenvalues.size(); ++i)
        fr += num(f.eigenvalues[i]) + "," + num(f.response[i]) + "\n";
      write_text(dir / "filter_response.csv", fr);

      const Rng rng(sp_seed);
      const GftProfile g = gft_profile(graph, game, sp_graphs, rng);
      std::string gft = "index,mean,std,sem\n";
      for (std::size_t i = 0; i < g.per_index.size(); ++i)
        gft += std::to_string(i) + "," + num(g.per_index[i].mean) + "," + num(g.per_index[i].std) + "," +
               num(g.per_index[i].sem()) + "\n";
      write_text(dir / "gft.csv", gft);

      const MeanStd me = min_abs_nonzero_eig_stats(graph, sp_graphs, rng);
      std::string mins = "statistic,mean,std,sem,count\n";
      auto row = [&](const std::string& name, const MeanStd& s) {
        mins += name + "," + num(s.mean) + "," + num(s.std) + "," + num(s.sem()) + "," + std::to_string(s.count) + "\n";
      };
      row("min_abs_nonzero_eig", me);
      row("mid_spectrum_mass", g.mid_mass);
      write_text(dir / "min_eig.csv", mins);
      std::printf("min_abs_nonzero_eig=%s mid_spectrum_mass=%s graphs=%zu\n", num(me.mean).c_str(),
                  num(g.mid_mass.mean).c_str(), sp_graphs);
    };
  });

  // ablate
  auto* ab = app.add_subcommand("ablate", "train and score over one varied setting");
  Common ab_common;
  DataOpts ab_data;
  TrainOpts ab_train;
  std::string ab_axis, ab_out;
  std::vector<double> ab_values;
  ab_common.add(ab, regs["ablate"]);
  ab_data.add(ab, regs["ablate"]);
  ab_train.add(ab, regs["ablate"]);
  regs["ablate"].add(ab, "axis", ab_axis, "k, n, train or noise")
      ->required()
      ->check(CLI::IsMember({"k", "n", "train", "noise"}));
  regs["ablate"].add(ab, "values", ab_values, "values of the axis")->required();
  regs["ablate"].add(ab, "out", ab_out, "output directory")->required();
  ab->callback([&] {
    action = [&] {
      ab_common.apply();
      const TrainConfig tcfg = ab_train.config();
      std::vector<GenerationConfig> cfgs;
      for (double v : ab_values) {
        GenerationConfig c = ab_data.config();
        const bool count_axis = ab_axis != "noise";
        if (count_axis && (v < 1 || v != std::floor(v)))
          throw ConfigError("ablate: " + ab_axis + " values must be positive integers");
        if (ab_axis == "k") c.games = static_cast<std::size_t>(v);
        if (ab_axis == "n") c.graph.n = static_cast<std::size_t>(v);
        if (ab_axis == "train") c.train = static_cast<std::size_t>(v);
        if (ab_axis == "noise") c.noise_std = v;
        c.validate();
        cfgs.push_back(c);
      }
      const fs::path dir = ensure_dir(ab_out);
      RunDir run(dir / "ablate", dir / ".lock", "ablate", regs["ablate"], raw);
      std::string csv = "axis,value,mean_auc,sem_auc,mean_acc,sem_acc,epochs,best_epoch\n";
      for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const Dataset ds = generate_dataset(cfgs[i]);
        const TrainResult r = train_logged(ds, tcfg);
        const MetricReport m = evaluate_model(r.params, ds, Split::Test).metrics;
        csv += ab_axis + "," + num(ab_values[i]) + "," + num(m.mean_auc) + "," + num(m.sem_auc) + "," +
               num(m.mean_acc) + "," + num(m.sem_acc) + "," + std::to_string(r.log.size()) + "," +
               std::to_string(r.best_epoch) + "\n";
        std::printf("%s=%s %s\n", ab_axis.c_str(), num(ab_values[i]).c_str(), summary_line(m).c_str());
        std::fflush(stdout);
      }
      write_text(dir / "ablation.csv", csv);
    };
  });

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the model gradient");
  Common gc_common;
  ModelOpts gc_model;
  std::size_t gc_n = 5, gc_k = 3, gc_samples = 200, gc_instances = 5;
  double gc_h = 1e-5, gc_tol = 1e-4;
  std::uint64_t gc_seed = 0;
  gc_common.add(gc, regs["gradcheck"]);
  gc_model.add(gc, regs["gradcheck"]);
  regs["gradcheck"].add(gc, "n", gc_n, "nodes")->check(CLI::Range(2, 1000));
  regs["gradcheck"].add(gc, "k", gc_k, "games")->check(CLI::PositiveNumber);
  regs["gradcheck"].add(gc, "samples", gc_samples, "coordinates per instance")->check(CLI::PositiveNumber);
  regs["gradcheck"].add(gc, "instances", gc_instances, "random instances")->check(CLI::PositiveNumber);
  regs["gradcheck"].add(gc, "step", gc_h, "central-difference step")->check(CLI::PositiveNumber);
  regs["gradcheck"].add(gc, "tol", gc_tol, "maximum accepted relative error");
  regs["gradcheck"].add(gc, "seed", gc_seed, "seed");
  gc->callback([&] {
    action = [&] {
      gc_common.apply();
      Rng rng(gc_seed);
      double worst = 0.0;
      std::size_t coords = 0, skipped = 0;
      std::string where;
      for (std::size_t i = 0; i < gc_instances; ++i) {
        NuggetParams p = init_params(gc_model.cfg, rng);
        for (auto& a : p.arrays)
          if (a.name.find(".b") != std::string::npos)
            for (double& v : a.values) v = 0.1 * rng.normal();
        Matrix x(gc_n, gc_k);
        for (double& v : x.values()) v = rng.normal();
        const GameSample sample{x, gen_ba(gc_n, 1, rng).binary_adjacency()};
        const ad::GradCheckResult r = model_grad_check(p, sample, rng, gc_samples, gc_h);
        coords += r.coordinates;
        skipped += r.skipped;
        if (r.max_rel_error >= worst) worst = r.max_rel_error, where = r.worst;
      }
      std::printf("max_rel_error=%s coordinates=%zu skipped=%zu worst=%s\n", num(worst).c_str(), coords, skipped,
                  where.c_str());
      if (!(worst < gc_tol))
        throw NumericalError("gradient check failed: relative error " + num(worst) + " at " + where);
    };
  });

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 1, e.what());
  }
  action();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    return fail("config", 1, e.what());
  } catch (const ArgumentError& e) {
    return fail("config", 1, e.what());
  } catch (const DataError& e) {
    return fail("data", 2, e.what());
  } catch (const GenerationError& e) {
    return fail("data", 2, e.what());
  } catch (const NumericalError& e) {
    return fail("numerical", 3, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("data", 2, e.what());
  } catch (const std::exception& e) {
    return fail("numerical", 3, e.what());
  }
}
