#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "nnbandit/nnbandit.hpp"

namespace nnbandit::cli {

namespace {

namespace fs = std::filesystem;

struct FeaturizeFlags {
  std::string dataset;
  std::string out;
  std::string method = "tfidf-pca";
  std::size_t dim = 8;
  std::size_t min_df = 2;
};

struct SyntheticFlags {
  std::size_t dim = 8;
  std::size_t contexts = 1000;
  std::size_t candidates = 10;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t dim_cap = kDefaultFeatureDimCap;
};

struct ExperimentFlags {
  std::string dataset;
  std::string embeddings;
  std::vector<std::string> policies{"ts"};
  std::vector<std::string> maps{"linear", "bilinear"};
  std::size_t k = 1;
  std::size_t rounds = 50000;
  double lambda = 1.0;
  std::vector<std::uint64_t> seeds{0};
  std::string split;
  std::string out_dir;
  std::size_t dim_cap = kDefaultFeatureDimCap;
  int newton_max_iter = 25;
  std::size_t log_stride = 10;
  std::vector<std::size_t> recall_ks{1, 2, 5};
  unsigned threads = 0;
};

void add_experiment_flags(CLI::App& cmd, ExperimentFlags& f) {
  cmd.add_option("--dataset", f.dataset, "Dataset TSV")->required();
  cmd.add_option("--embeddings", f.embeddings, "EMB1 embedding file")->required();
  cmd.add_option("--policy", f.policies, "ts, greedy or random (repeatable)")
      ->capture_default_str();
  cmd.add_option("--map", f.maps, "linear or bilinear (repeatable)")->capture_default_str();
  cmd.add_option("--k", f.k, "Responses returned per round")->capture_default_str();
  cmd.add_option("--rounds", f.rounds, "Replay rounds per cell")->capture_default_str();
  cmd.add_option("--lambda", f.lambda, "Prior precision")->capture_default_str();
  cmd.add_option("--seed", f.seeds, "Replication seed (repeatable)")->capture_default_str();
  cmd.add_option("--split", f.split, "ONLINE:EVAL context counts (default 80%:20%)");
  cmd.add_option("--out-dir", f.out_dir, "Output directory")->required();
  cmd.add_option("--dim-cap", f.dim_cap, "Largest feature dimension")->capture_default_str();
  cmd.add_option("--newton-max-iter", f.newton_max_iter, "Newton iterations per refit")
      ->capture_default_str();
  cmd.add_option("--log-stride", f.log_stride, "Regret CSV row every N rounds")
      ->capture_default_str();
  cmd.add_option("--recall-k", f.recall_ks, "Recall cut-offs (repeatable)")
      ->capture_default_str();
  cmd.add_option("--threads", f.threads, "Worker threads, 0 = all cores")->capture_default_str();
}

ExperimentConfig to_config(const ExperimentFlags& f) {
  ExperimentConfig config;
  config.policies.clear();
  for (const auto& p : f.policies) config.policies.push_back(parse_policy_kind(p));
  config.feature_maps.clear();
  for (const auto& m : f.maps) config.feature_maps.push_back(parse_feature_map_kind(m));
  config.k = f.k;
  config.rounds = f.rounds;
  config.lambda = f.lambda;
  config.seeds = f.seeds;
  if (!f.split.empty()) config.split = parse_split(f.split);
  config.feature_dim_cap = f.dim_cap;
  config.newton_max_iterations = f.newton_max_iter;
  config.log_stride = f.log_stride;
  config.recall_ks = f.recall_ks;
  config.threads = f.threads;
  return config;
}

void create_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
}

template <class Body>
void write_file(const fs::path& path, Body&& body) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  body(out);
  if (!out) throw IoError(path, "write failed");
}

void cmd_featurize(const FeaturizeFlags& f, std::ostream& out) {
  if (f.method != "tfidf-pca") {
    throw ValidationError("unknown featurization method '" + f.method + "'");
  }
  const auto dataset = load_dataset(f.dataset);

  // One document per distinct id: contexts and responses in first-seen order.
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> docs;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& id, const std::string& text) {
    if (seen.insert(id).second) {
      ids.push_back(id);
      docs.push_back(tokenize(text));
    }
  };
  for (const auto& ctx : dataset.contexts) {
    add(ctx.context_id, ctx.context_text);
    for (const auto& cand : ctx.candidates) add(cand.response_id, cand.response_text);
  }
  const bool any_tokens =
      std::any_of(docs.begin(), docs.end(), [](const auto& d) { return !d.empty(); });
  if (!any_tokens) throw ValidationError("dataset has no text to featurize");

  TfidfOptions tfidf_options;
  tfidf_options.min_df = f.min_df;
  const auto tfidf = tfidf_fit(docs, tfidf_options);
  if (f.dim > tfidf.vocabulary_size()) {
    throw DimensionError("target dimension " + std::to_string(f.dim) + " exceeds the " +
                         std::to_string(tfidf.vocabulary_size()) + "-token vocabulary");
  }

  std::vector<SparseVector> rows;
  rows.reserve(docs.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    rows.push_back(tfidf.transform(docs[i]));
    for (SparseVector::InnerIterator it(rows.back()); it; ++it) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.index()), it.value());
    }
  }
  SparseRowMatrix matrix(static_cast<Eigen::Index>(docs.size()),
                         static_cast<Eigen::Index>(tfidf.vocabulary_size()));
  matrix.setFromTriplets(triplets.begin(), triplets.end());

  const auto pca = pca_fit(matrix, f.dim);
  EmbeddingStore store(f.dim);
  for (std::size_t i = 0; i < ids.size(); ++i) store.insert(ids[i], pca_transform(pca, rows[i]));
  write_embeddings(store, fs::path(f.out));
  out << "wrote " << store.size() << " embeddings of dimension " << f.dim << " to " << f.out
      << '\n';
}

void cmd_make_synthetic(const SyntheticFlags& f, std::ostream& out) {
  const auto env = make_synthetic(f.dim, f.contexts, f.candidates, f.seed, f.dim_cap);
  const fs::path dir(f.out_dir);
  create_dir(dir);
  write_dataset(env.dataset, dir / "dataset.tsv");
  write_embeddings(env.embeddings, dir / "embeddings.emb");
  write_truth_csv(env.truth.true_matrix, dir / "truth.csv");
  out << "wrote " << env.dataset.contexts.size() << " contexts to " << dir.string() << '\n';
}

struct LoadedInputs {
  ExperimentConfig config;
  ReplayDataset dataset;
  EmbeddingStore store;
};

LoadedInputs load_and_validate(const ExperimentFlags& f) {
  LoadedInputs in{to_config(f), load_dataset(f.dataset), load_embeddings(f.embeddings)};
  validate_config(in.config, in.dataset, in.store);
  return in;
}

void cmd_simulate(const ExperimentFlags& f, std::ostream& out, std::ostream& err) {
  auto in = load_and_validate(f);
  in.config.progress = [&err](const std::string& line) { err << line << '\n'; };
  const auto parts =
      split_dataset(in.dataset, resolve_split(in.config, in.dataset.contexts.size()));

  const fs::path dir(f.out_dir);
  const auto cells = run_simulation(in.config, parts.online, in.store);
  create_dir(dir / "posteriors");
  write_file(dir / "regret.csv",
             [&](std::ostream& o) { write_regret_csv(cells, in.config.log_stride, o); });
  for (const auto& cell : cells) write_posterior(cell.posterior, posterior_path(dir, cell.key));
  out << "simulated " << cells.size() << " cell(s); wrote " << (dir / "regret.csv").string()
      << '\n';
}

void cmd_evaluate(const ExperimentFlags& f, std::ostream& out) {
  const auto in = load_and_validate(f);
  const auto parts =
      split_dataset(in.dataset, resolve_split(in.config, in.dataset.contexts.size()));
  const fs::path dir(f.out_dir);

  const auto keys = experiment_cells(in.config);
  std::vector<PosteriorState> posteriors;
  for (const auto& key : keys) {
    posteriors.push_back(read_posterior(posterior_path(dir, key), in.config.lambda));
  }
  const auto rows = evaluate_recall(in.config, keys, posteriors, parts.eval, in.store);
  write_file(dir / "recall.csv", [&](std::ostream& o) { write_recall_csv(rows, o); });
  out << "evaluated " << keys.size() << " cell(s) on " << parts.eval.contexts.size()
      << " contexts; wrote " << (dir / "recall.csv").string() << '\n';
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return kExitValidation;
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kNumerical:
      return kExitNumerical;
  }
  return kExitValidation;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splices the `--key=value` lines of each `--config FILE` into the argument list
// at the position of the flag, so keys bind to the subcommand that precedes it.
// Blank lines and lines starting with '#' are skipped.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    std::string file;
    if (arg == "--config" && i + 1 < argc) {
      file = argv[++i];
    } else if (arg.starts_with("--config=")) {
      file = arg.substr(9);
    } else {
      args.emplace_back(arg);
      continue;
    }
    std::ifstream in(file);
    if (!in) throw IoError(file, "cannot open config file");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto text = trim(line);
      if (text.empty() || text.front() == '#') continue;
      const auto eq = text.find('=');
      if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty()) {
        throw ParseError(line_no, file + ": expected key=value");
      }
      auto key = trim(text.substr(0, eq));
      if (key.starts_with("--")) key.remove_prefix(2);
      args.push_back("--" + std::string(key) + "=" + std::string(trim(text.substr(eq + 1))));
    }
  }
  return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contextual bandits with bilinear Thompson sampling for response selection"};
  app.require_subcommand(1);
  // Flags given after --config override the file's values.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  FeaturizeFlags featurize;
  auto* featurize_cmd = app.add_subcommand("featurize", "TF-IDF + PCA embeddings for a dataset");
  featurize_cmd->add_option("--dataset", featurize.dataset, "Dataset TSV")->required();
  featurize_cmd->add_option("--out", featurize.out, "Output EMB1 file")->required();
  featurize_cmd->add_option("--method", featurize.method, "Featurization method")
      ->capture_default_str();
  featurize_cmd->add_option("--dim", featurize.dim, "Output dimension")->capture_default_str();
  featurize_cmd->add_option("--min-df", featurize.min_df, "Minimum document frequency")
      ->capture_default_str();

  SyntheticFlags synthetic;
  auto* synthetic_cmd =
      app.add_subcommand("make-synthetic", "Generate a synthetic bilinear environment");
  synthetic_cmd->add_option("--dim", synthetic.dim, "Embedding dimension")->capture_default_str();
  synthetic_cmd->add_option("--contexts", synthetic.contexts, "Number of contexts")
      ->capture_default_str();
  synthetic_cmd->add_option("--candidates", synthetic.candidates, "Candidates per context")
      ->capture_default_str();
  synthetic_cmd->add_option("--seed", synthetic.seed, "Generator seed")->capture_default_str();
  synthetic_cmd->add_option("--out-dir", synthetic.out_dir, "Output directory")->required();
  synthetic_cmd->add_option("--dim-cap", synthetic.dim_cap, "Largest feature dimension")
      ->capture_default_str();

  ExperimentFlags simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the online replay");
  add_experiment_flags(*simulate_cmd, simulate);

  ExperimentFlags evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Recall@k of persisted posteriors");
  add_experiment_flags(*evaluate_cmd, evaluate);

  for (auto* cmd : {featurize_cmd, synthetic_cmd, simulate_cmd, evaluate_cmd}) {
    cmd->add_option("--config", "key=value file of flags; later flags override it");
  }

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*featurize_cmd) {
      cmd_featurize(featurize, out);
    } else if (*synthetic_cmd) {
      cmd_make_synthetic(synthetic, out);
    } else if (*simulate_cmd) {
      cmd_simulate(simulate, out, err);
    } else if (*evaluate_cmd) {
      cmd_evaluate(evaluate, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace nnbandit::cli
