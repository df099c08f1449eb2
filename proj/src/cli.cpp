#include "spabm/cli.hpp"

#include "spabm/config.hpp"
#include "spabm/error.hpp"
#include "spabm/estimator.hpp"
#include "spabm/io.hpp"
#include "spabm/metrics.hpp"
#include "spabm/modelselect.hpp"
#include "spabm/parallel.hpp"
#include "spabm/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace spabm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kSscKeys = {"gamma1", "gamma2", "tol", "kkt_tol", "max_iter", "restarts",
                                        "kmeans_max_iter", "row_normalize", "gamma1_cap_fraction"};
const std::set<std::string> kPenaltyKeys = {"penalty", "beta1", "beta2"};

std::set<std::string> keys_with(std::set<std::string> base, std::initializer_list<const std::set<std::string>*> extra) {
  for (const auto* e : extra) base.insert(e->begin(), e->end());
  return base;
}

const std::set<std::string> kGenerateKeys = {"n", "k", "sigma", "omega", "seed", "sizes"};
const std::set<std::string> kFitKeys = keys_with({"k", "seed", "zero_tol", "workers"}, {&kSscKeys, &kPenaltyKeys});
const std::set<std::string> kSweepKeys =
    keys_with({"n", "k", "sigma", "omega", "reps", "seed", "zero_tol", "workers"}, {&kSscKeys});
const std::set<std::string> kSelectKeys =
    keys_with({"n", "k", "sigma", "omega", "k_range", "reps", "seed", "workers"}, {&kSscKeys, &kPenaltyKeys});
const std::set<std::string> kIngestKeys = {"threshold"};
const std::set<std::string> kEvaluateKeys = {"zero_tol"};

// Settings that cannot change any primary output stay out of the hash.
const std::set<std::string> kUnhashed = {"workers"};

// Effective settings of one invocation: config file entries overridden by
// flags, plus content fingerprints of every input file.
struct Invocation {
  std::string command;
  KeyValueConfig cfg;
  std::map<std::string, fs::path> inputs;
  fs::path out_dir = ".";

  std::string hash() const {
    std::string canon = "command=" + command + "\n";
    for (const auto& [k, v] : cfg.values())
      if (!kUnhashed.count(k)) canon += k + "=" + v + "\n";
    for (const auto& [k, path] : inputs) canon += "input." + k + "=" + hex64(fnv1a(io::read_file(path))) + "\n";
    return hex64(fnv1a(canon));
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!cfg.has(key)) return fallback;
    if constexpr (std::is_same_v<T, bool>) {
      return cfg.boolean(key);
    } else if constexpr (std::is_integral_v<T>) {
      const long long v = cfg.integer(key);
      if constexpr (std::is_unsigned_v<T>) {
        if (v < 0) throw ConfigError(key + " must be nonnegative");
      }
      return static_cast<T>(v);
    } else {
      return static_cast<T>(cfg.number(key));
    }
  }

  const fs::path& input(const std::string& name) const {
    auto it = inputs.find(name);
    if (it == inputs.end()) throw ConfigError(command + ": missing required input --" + name);
    return it->second;
  }
  bool has_input(const std::string& name) const { return inputs.count(name) > 0; }
};

SscOptions ssc_options(const Invocation& inv, int workers) {
  SscOptions o;
  if (inv.cfg.has("gamma1")) o.gamma1 = inv.cfg.number("gamma1");
  if (inv.cfg.has("gamma2")) o.gamma2 = inv.cfg.number("gamma2");
  o.gamma1_cap_fraction = inv.get("gamma1_cap_fraction", o.gamma1_cap_fraction);
  if (o.gamma1_cap_fraction < 0) throw ConfigError("gamma1_cap_fraction must be nonnegative");
  o.elastic_net.tol = inv.get("tol", o.elastic_net.tol);
  o.elastic_net.kkt_tol = inv.get("kkt_tol", o.elastic_net.kkt_tol);
  o.elastic_net.max_iter = inv.get("max_iter", o.elastic_net.max_iter);
  o.elastic_net.workers = workers;
  o.spectral.restarts = inv.get("restarts", o.spectral.restarts);
  o.spectral.kmeans_max_iter = inv.get("kmeans_max_iter", o.spectral.kmeans_max_iter);
  o.spectral.row_normalize = inv.get("row_normalize", o.spectral.row_normalize);
  if (o.elastic_net.tol <= 0 || o.elastic_net.kkt_tol <= 0) throw ConfigError("tol and kkt_tol must be positive");
  if (o.elastic_net.max_iter < 1 || o.spectral.restarts < 1 || o.spectral.kmeans_max_iter < 1)
    throw ConfigError("max_iter, restarts and kmeans_max_iter must be at least 1");
  return o;
}

PenaltyParams penalty_params(const Invocation& inv) {
  PenaltyParams p;
  if (inv.cfg.has("penalty")) p.variant = parse_penalty_variant(inv.cfg.raw("penalty"));
  p.beta1 = inv.get("beta1", p.beta1);
  p.beta2 = inv.get("beta2", p.beta2);
  p.validate();
  return p;
}

int workers_of(const Invocation& inv) {
  const int w = inv.get("workers", 1);
  if (w < 1) throw ConfigError("workers must be at least 1");
  return w;
}

GeneratorConfig generator_config(const Invocation& inv) {
  GeneratorConfig g;
  g.n = inv.get("n", g.n);
  g.k = inv.get("k", g.k);
  g.sigma = inv.get("sigma", g.sigma);
  g.omega = inv.get("omega", g.omega);
  g.seed = inv.get<std::uint64_t>("seed", g.seed);
  if (inv.cfg.has("sizes")) {
    g.balanced = false;
    for (long long s : inv.cfg.integers("sizes")) g.sizes.push_back(static_cast<int>(s));
  }
  g.validate();
  return g;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string matrix_text(const Matrix& m, const io::Provenance& prov) {
  std::ostringstream s;
  io::write_matrix(s, m, prov);
  return s.str();
}

std::string labels_text(const Clustering& z, const io::Provenance& prov) {
  std::ostringstream s;
  io::write_labels(s, z, prov);
  return s.str();
}

std::string support_text(const SupportFamily& j, const io::Provenance& prov) {
  std::ostringstream s;
  io::write_support(s, j, prov);
  return s.str();
}

void write_json(const fs::path& path, const json& j) { io::write_file(path, j.dump(2) + "\n"); }

json report_json(const EvaluationReport& r) {
  std::vector<int> perm;
  for (int c : r.matched_permutation) perm.push_back(c + 1);
  return json{{"clustering_error", r.clustering_error},
              {"estimation_error", r.estimation_error},
              {"rho_fp", r.rho_fp},
              {"delta_fn", r.delta_fn},
              {"matched_permutation", perm}};
}

// Re-raises a pipeline error with the stage name in front, keeping its kind.
template <typename F>
auto staged(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const NumericalError& e) {
    throw NumericalError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(stage + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  }
}

FitResult staged_fit(const AdjacencyMatrix& a, int k, std::uint64_t seed, const SscOptions& options) {
  if (k < 1 || k > a.n()) throw ConfigError("K=" + std::to_string(k) + " outside [1, n]");
  const SpectralEmbedding emb = staged("self-representation", [&] { return embed_network(a, options); });
  const Clustering z = staged("spectral clustering", [&] { return emb.cluster(k, seed, options.spectral); });
  return staged("estimation", [&] { return fit_with_clustering(a, z); });
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

// ---------------------------------------------------------------- commands

void cmd_generate(const Invocation& inv, std::ostream& out) {
  const GeneratorConfig g = generator_config(inv);
  const io::Provenance prov{inv.hash(), g.seed};
  const SyntheticInstance inst = generate_instance(g);
  ensure_dir(inv.out_dir);
  io::write_file(inv.out_dir / "adjacency.txt", matrix_text(inst.adjacency.matrix(), prov));
  io::write_file(inv.out_dir / "probability.txt", matrix_text(inst.probability.matrix(), prov));
  io::write_file(inv.out_dir / "lambda.txt", matrix_text(inst.lambda.matrix(), prov));
  io::write_file(inv.out_dir / "labels.txt", labels_text(inst.clustering, prov));
  io::write_file(inv.out_dir / "support.txt", support_text(inst.true_support, prov));
  json meta{{"generator", "spabm-synthgen"},
            {"rng", std::string(kRngName)},
            {"seed", g.seed},
            {"config_hash", prov.config_hash},
            {"config", inv.cfg.values()},
            {"n", g.n},
            {"k", g.k},
            {"sizes", g.community_sizes()},
            {"zeroed_entries", zeroed_entry_count(g)},
            {"edges", inst.adjacency.nonzeros() / 2}};
  write_json(inv.out_dir / "metadata.json", meta);
  out << "generated n=" << g.n << " K=" << g.k << " edges=" << inst.adjacency.nonzeros() / 2 << " -> "
      << inv.out_dir.string() << '\n';
}

void cmd_fit(const Invocation& inv, std::ostream& out) {
  const AdjacencyMatrix a = staged("reading adjacency", [&] { return AdjacencyMatrix(io::load_matrix(inv.input("adjacency"))); });
  if (!inv.cfg.has("k")) throw ConfigError("fit: --k is required");
  const int k = inv.get("k", 0);
  const std::uint64_t seed = inv.get<std::uint64_t>("seed", 1);
  const SscOptions options = ssc_options(inv, workers_of(inv));
  const PenaltyParams params = penalty_params(inv);
  const double zero_tol = inv.get("zero_tol", 0.0);
  const io::Provenance prov{inv.hash(), seed};

  std::optional<Clustering> truth_z;
  std::optional<Matrix> truth_p;
  if (inv.has_input("truth-labels")) truth_z = io::load_labels(inv.input("truth-labels"));
  if (inv.has_input("truth-probability")) truth_p = io::load_matrix(inv.input("truth-probability"));

  const FitResult f = staged_fit(a, k, seed, options);
  const Gammas g = resolve_gammas(a, options);
  const double residual = fit_residual(a, f.probability);
  const double pen = penalty(a.n(), f.clustering.sizes(), SupportCounts::of(f.support), params, density(a));

  ensure_dir(inv.out_dir);
  io::write_file(inv.out_dir / "labels.txt", labels_text(f.clustering, prov));
  io::write_file(inv.out_dir / "probability.txt", matrix_text(f.probability.matrix(), prov));
  io::write_file(inv.out_dir / "support.txt", support_text(f.support, prov));
  json summary{{"config_hash", prov.config_hash},
               {"seed", seed},
               {"n", a.n()},
               {"k", k},
               {"sizes", f.clustering.sizes()},
               {"gamma1", g.gamma1},
               {"gamma2", g.gamma2},
               {"penalty_variant", std::string(to_string(params.variant))},
               {"fit_residual", residual},
               {"penalty", pen},
               {"score", residual + pen},
               {"block_objective", objective(a, f.clustering, f.support, params)},
               {"clipped_entries", f.estimate.clipped}};
  write_json(inv.out_dir / "fit.json", summary);
  out << "fit K=" << k << " score=" << io::format_double(residual + pen);

  if (truth_z) {
    if (truth_z->n() != a.n()) throw DataError("truth labels have " + std::to_string(truth_z->n()) + " nodes, adjacency has " + std::to_string(a.n()));
    json report;
    if (truth_z->k() == k) {
      if (truth_p) {
        report = report_json(evaluate(f.clustering, *truth_z, f.probability.matrix(), *truth_p, zero_tol));
      } else {
        const ClusteringError ce = clustering_error(f.clustering, *truth_z);
        report = json{{"clustering_error", ce.error}};
      }
    } else {
      report = json{{"clustering_error", nullptr}, {"note", "K differs from the reference clustering"}};
      if (truth_p) {
        report["estimation_error"] = estimation_error(f.probability.matrix(), *truth_p);
        report["rho_fp"] = false_positive_rate(f.probability.matrix(), *truth_p, zero_tol);
        report["delta_fn"] = delta_fn(f.probability.matrix(), *truth_p, zero_tol);
      }
    }
    report["config_hash"] = prov.config_hash;
    report["seed"] = seed;
    write_json(inv.out_dir / "report.json", report);
    if (report["clustering_error"].is_number())
      out << " clustering_error=" << io::format_double(report["clustering_error"].get<double>())
          << " accuracy=" << io::format_double(1.0 - report["clustering_error"].get<double>());
  } else if (truth_p) {
    json report{{"estimation_error", estimation_error(f.probability.matrix(), *truth_p)},
                {"rho_fp", false_positive_rate(f.probability.matrix(), *truth_p, zero_tol)},
                {"delta_fn", delta_fn(f.probability.matrix(), *truth_p, zero_tol)},
                {"config_hash", prov.config_hash},
                {"seed", seed}};
    write_json(inv.out_dir / "report.json", report);
  }
  out << '\n';
}

void cmd_evaluate(const Invocation& inv, std::ostream& out) {
  const double zero_tol = inv.get("zero_tol", 0.0);
  const Clustering z = io::load_labels(inv.input("labels"));
  const Clustering zt = io::load_labels(inv.input("truth-labels"));
  if (z.n() != zt.n()) throw DataError("evaluate: label files have different node counts");
  json report;
  if (inv.has_input("probability") != inv.has_input("truth-probability"))
    throw ConfigError("evaluate: --probability and --truth-probability go together");
  if (inv.has_input("probability")) {
    const Matrix p = io::load_matrix(inv.input("probability"));
    const Matrix pt = io::load_matrix(inv.input("truth-probability"));
    report = report_json(evaluate(z, zt, p, pt, zero_tol));
  } else {
    const ClusteringError ce = clustering_error(z, zt);
    std::vector<int> perm;
    for (int c : ce.permutation) perm.push_back(c + 1);
    report = json{{"clustering_error", ce.error}, {"matched_permutation", perm}};
  }
  report["config_hash"] = inv.hash();
  report["seed"] = 0;
  ensure_dir(inv.out_dir);
  write_json(inv.out_dir / "report.json", report);
  out << report.dump(2) << '\n';
}

struct SweepRow {
  GeneratorConfig cell;
  int rep = 0;
  bool ok = false;
  std::string failure;
  EvaluationReport report;
  double seconds = 0.0;
};

void cmd_sweep(const Invocation& inv, std::ostream& out) {
  const auto list = [&](const std::string& key, std::vector<double> fallback) {
    return inv.cfg.has(key) ? inv.cfg.numbers(key) : fallback;
  };
  const auto ilist = [&](const std::string& key, std::vector<long long> fallback) {
    return inv.cfg.has(key) ? inv.cfg.integers(key) : fallback;
  };
  const std::vector<long long> ns = ilist("n", {300, 420, 540});
  const std::vector<long long> ks = ilist("k", {4});
  const std::vector<double> sigmas = list("sigma", {0.3, 0.7});
  const std::vector<double> omegas = list("omega", {0.5, 0.8});
  const int reps = inv.get("reps", 20);
  const std::uint64_t base_seed = inv.get<std::uint64_t>("seed", 1);
  const double zero_tol = inv.get("zero_tol", 0.0);
  const int workers = workers_of(inv);
  const SscOptions options = ssc_options(inv, 1);
  if (reps < 1) throw ConfigError("reps must be at least 1");
  if (ns.empty() || ks.empty() || sigmas.empty() || omegas.empty()) throw ConfigError("sweep grid is empty");

  std::vector<GeneratorConfig> cells;
  for (long long n : ns)
    for (long long k : ks)
      for (double s : sigmas)
        for (double w : omegas) {
          GeneratorConfig g;
          g.n = static_cast<int>(n);
          g.k = static_cast<int>(k);
          g.sigma = s;
          g.omega = w;
          g.validate();
          cells.push_back(g);
        }

  std::vector<SweepRow> rows(cells.size() * reps);
  parallel_for(static_cast<int>(rows.size()), workers, [&](int idx) {
    SweepRow& row = rows[idx];
    row.cell = cells[idx / reps];
    row.rep = idx % reps;
    // Repetition r uses the same seed in every cell.
    row.cell.seed = derive_seed(base_seed, static_cast<std::uint64_t>(row.rep));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const SyntheticInstance inst = generate_instance(row.cell);
      const FitResult f = staged_fit(inst.adjacency, row.cell.k, row.cell.seed, options);
      row.report = evaluate(f.clustering, inst.clustering, f.probability.matrix(), inst.probability.matrix(), zero_tol);
      row.ok = true;
    } catch (const Error& e) {
      row.failure = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  const io::Provenance prov{inv.hash(), base_seed};
  const auto cell_key = [](const GeneratorConfig& g) {
    return std::to_string(g.n) + "," + std::to_string(g.k) + "," + io::format_double(g.sigma) + "," +
           io::format_double(g.omega);
  };
  std::string rows_csv = prov.comment() + "n,k,sigma,omega,rep,seed,status,clustering_error,estimation_error,rho_fp,delta_fn\n";
  std::string timing_csv = prov.comment() + "n,k,sigma,omega,rep,seconds\n";
  std::string means_csv = prov.comment() +
                          "n,k,sigma,omega,reps_ok,reps_failed,clustering_error,estimation_error,rho_fp,delta_fn\n";
  long long failed = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double sums[4] = {0, 0, 0, 0};
    int ok = 0;
    for (int r = 0; r < reps; ++r) {
      const SweepRow& row = rows[c * reps + r];
      rows_csv += cell_key(row.cell) + "," + std::to_string(row.rep + 1) + "," + std::to_string(row.cell.seed) + ",";
      if (row.ok) {
        const EvaluationReport& e = row.report;
        rows_csv += "ok," + io::format_double(e.clustering_error) + "," + io::format_double(e.estimation_error) + "," +
                    io::format_double(e.rho_fp) + "," + io::format_double(e.delta_fn) + "\n";
        sums[0] += e.clustering_error;
        sums[1] += e.estimation_error;
        sums[2] += e.rho_fp;
        sums[3] += e.delta_fn;
        ++ok;
      } else {
        rows_csv += "failed: " + csv_safe(row.failure) + ",,,,\n";
        ++failed;
      }
      timing_csv += cell_key(row.cell) + "," + std::to_string(row.rep + 1) + "," + io::format_double(row.seconds) + "\n";
    }
    means_csv += cell_key(cells[c]) + "," + std::to_string(ok) + "," + std::to_string(reps - ok);
    for (double s : sums) means_csv += "," + (ok ? io::format_double(s / ok) : std::string());
    means_csv += "\n";
  }
  ensure_dir(inv.out_dir);
  io::write_file(inv.out_dir / "rows.csv", rows_csv);
  io::write_file(inv.out_dir / "means.csv", means_csv);
  io::write_file(inv.out_dir / "timing.csv", timing_csv);
  write_json(inv.out_dir / "metadata.json", json{{"config_hash", prov.config_hash},
                                                 {"seed", base_seed},
                                                 {"rng", std::string(kRngName)},
                                                 {"config", inv.cfg.values()},
                                                 {"cells", cells.size()},
                                                 {"reps", reps},
                                                 {"failed_rows", failed}});
  out << "sweep: " << cells.size() << " cells x " << reps << " reps, " << failed << " failed -> "
      << inv.out_dir.string() << '\n';
}

void cmd_select_k(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const bool from_file = inv.has_input("adjacency");
  std::optional<AdjacencyMatrix> fixed;
  GeneratorConfig g;
  if (from_file) {
    for (const char* key : {"n", "sigma", "omega"})
      if (inv.cfg.has(key)) throw ConfigError(std::string("select-k: '") + key + "' has no effect with --adjacency");
    fixed = AdjacencyMatrix(io::load_matrix(inv.input("adjacency")));
  } else {
    Invocation gen = inv;
    gen.cfg = KeyValueConfig();
    for (const char* key : {"n", "k", "sigma", "omega"})
      if (inv.cfg.has(key)) gen.cfg.set(key, inv.cfg.raw(key));
    g = generator_config(gen);
  }
  const int n = from_file ? fixed->n() : g.n;
  const std::vector<int> k_range = inv.cfg.has("k_range") ? parse_int_range(inv.cfg.raw("k_range")) : default_k_range(n);
  if (k_range.empty()) throw ConfigError("select-k: empty K range");
  if (from_file && inv.cfg.has("k")) throw ConfigError("select-k: 'k' is only used with a generator config");
  const int reps = inv.get("reps", 1);
  if (reps < 1) throw ConfigError("reps must be at least 1");
  const std::uint64_t base_seed = inv.get<std::uint64_t>("seed", 1);
  const PenaltyParams params = penalty_params(inv);
  const int workers = workers_of(inv);
  const SscOptions options = ssc_options(inv, 1);

  struct Rep {
    std::uint64_t seed = 0;
    std::optional<SelectionResult> result;
    std::string failure;
  };
  std::vector<Rep> results(reps);
  std::mutex err_mutex;
  parallel_for(reps, workers, [&](int r) {
    Rep& rep = results[r];
    rep.seed = derive_seed(base_seed, static_cast<std::uint64_t>(r));
    try {
      if (from_file) {
        rep.result = select_k(*fixed, k_range, params, rep.seed, options);
      } else {
        GeneratorConfig cell = g;
        cell.seed = rep.seed;
        rep.result = select_k(generate_instance(cell).adjacency, k_range, params, rep.seed, options);
      }
    } catch (const NumericalError& e) {
      rep.failure = e.what();
      std::scoped_lock lock(err_mutex);
      err << "warning: repetition " << r + 1 << " failed: " << e.what() << '\n';
    }
  });

  const io::Provenance prov{inv.hash(), base_seed};
  std::map<int, int> counts;
  for (int k : k_range) counts[k] = 0;
  int ok = 0;
  std::string scores = prov.comment() + "rep,seed,k,status,residual,penalty,score,selected\n";
  for (int r = 0; r < reps; ++r) {
    const Rep& rep = results[r];
    if (!rep.result) {
      scores += std::to_string(r + 1) + "," + std::to_string(rep.seed) + ",,failed: " + csv_safe(rep.failure) + ",,,,\n";
      continue;
    }
    ++ok;
    ++counts[rep.result->k_hat];
    for (const CandidateScore& s : rep.result->scores) {
      scores += std::to_string(r + 1) + "," + std::to_string(rep.seed) + "," + std::to_string(s.k) + ",";
      if (s.ok) {
        scores += "ok," + io::format_double(s.residual) + "," + io::format_double(s.penalty) + "," +
                  io::format_double(s.score) + "," + (s.k == rep.result->k_hat ? "1" : "0") + "\n";
      } else {
        scores += "failed: " + csv_safe(s.failure) + ",,,,0\n";
      }
    }
  }
  if (ok == 0) throw NumericalError("select-k: every repetition failed");
  std::string freq = prov.comment() + "k,count,frequency\n";
  for (const auto& [k, c] : counts)
    freq += std::to_string(k) + "," + std::to_string(c) + "," + io::format_double(static_cast<double>(c) / ok) + "\n";
  ensure_dir(inv.out_dir);
  io::write_file(inv.out_dir / "kfreq.csv", freq);
  io::write_file(inv.out_dir / "kscores.csv", scores);
  write_json(inv.out_dir / "metadata.json", json{{"config_hash", prov.config_hash},
                                                 {"seed", base_seed},
                                                 {"rng", std::string(kRngName)},
                                                 {"config", inv.cfg.values()},
                                                 {"penalty_variant", std::string(to_string(params.variant))},
                                                 {"reps", reps},
                                                 {"failed_reps", reps - ok}});
  out << "select-k:";
  for (const auto& [k, c] : counts) out << " K=" << k << ":" << c;
  out << " (" << ok << " reps)\n";
}

void cmd_ingest(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const double threshold = inv.get("threshold", 0.0);
  const bool edges = inv.has_input("edges");
  if (edges == inv.has_input("matrix")) throw ConfigError("ingest: give exactly one of --edges or --matrix");
  const io::Provenance prov{inv.hash(), 0};
  ensure_dir(inv.out_dir);
  json summary{{"config_hash", prov.config_hash}, {"seed", 0}, {"threshold", threshold}};
  AdjacencyMatrix a = AdjacencyMatrix::empty(0);
  std::vector<long long> ids;
  if (edges) {
    std::istringstream in(io::read_file(inv.input("edges")));
    io::EdgeList list = io::read_edge_list(in, {threshold}, inv.input("edges").string());
    if (list.self_loops > 0) err << "warning: dropped " << list.self_loops << " self-loop line(s)\n";
    if (list.duplicates > 0) err << "warning: collapsed " << list.duplicates << " duplicate edge(s)\n";
    summary["self_loops_dropped"] = list.self_loops;
    summary["duplicates_collapsed"] = list.duplicates;
    summary["below_threshold"] = list.below_threshold;
    a = std::move(list.adjacency);
    ids = std::move(list.original_ids);
  } else {
    a = io::binarize(io::load_matrix(inv.input("matrix")), threshold);
    if (a.nonzeros() == 0) throw DataError("ingest: graph has no edges");
    for (int i = 0; i < a.n(); ++i) ids.push_back(i + 1);
  }
  summary["n"] = a.n();
  summary["edges"] = a.nonzeros() / 2;
  std::string map = prov.comment() + "node,original_id\n";
  for (std::size_t i = 0; i < ids.size(); ++i) map += std::to_string(i + 1) + "," + std::to_string(ids[i]) + "\n";
  io::write_file(inv.out_dir / "adjacency.txt", matrix_text(a.matrix(), prov));
  io::write_file(inv.out_dir / "node_map.csv", map);
  write_json(inv.out_dir / "ingest.json", summary);
  out << "ingested n=" << a.n() << " edges=" << a.nonzeros() / 2 << '\n';
}

// ---------------------------------------------------------------- parsing

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  const std::set<std::string>* keys = nullptr;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, std::string> file_values;
  std::vector<std::pair<CLI::Option*, std::string>> flag_options;
  std::vector<std::pair<CLI::Option*, std::string>> file_options;
  std::string config_path;
  std::string out_dir = ".";
};

void add_flag(Command& c, const std::string& flag, const std::string& key, const std::string& help) {
  if (!c.keys->count(key)) return;
  CLI::Option* o = c.app->add_option("--" + flag, c.flag_values[key], help);
  c.flag_options.emplace_back(o, key);
}

void add_file(Command& c, const std::string& name, const std::string& help) {
  CLI::Option* o = c.app->add_option("--" + name, c.file_values[name], help);
  c.file_options.emplace_back(o, name);
}

Invocation build(const Command& c) {
  Invocation inv;
  inv.command = c.name;
  if (!c.config_path.empty()) inv.cfg = KeyValueConfig::parse(io::read_file(c.config_path), *c.keys, c.config_path);
  for (const auto& [opt, key] : c.flag_options)
    if (opt->count() > 0) inv.cfg.set(key, c.flag_values.at(key));
  for (const auto& [opt, name] : c.file_options)
    if (opt->count() > 0) inv.inputs[name] = c.file_values.at(name);
  inv.out_dir = c.out_dir;
  return inv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse popularity adjusted block model toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::vector<std::unique_ptr<Command>> commands;
  const auto make = [&](const std::string& name, const std::string& help, const std::set<std::string>& keys) {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->keys = &keys;
    c->app = app.add_subcommand(name, help);
    c->app->add_option("--config", c->config_path, "Key-value configuration file");
    c->app->add_option("--out-dir", c->out_dir, "Output directory (created if missing)");
    add_flag(*c, "seed", "seed", "Base random seed");
    add_flag(*c, "n", "n", "Node count (list for sweep)");
    add_flag(*c, "k", "k", "Community count (list for sweep)");
    add_flag(*c, "sigma", "sigma", "Proportion of nonzero non-diagonal popularity entries (list for sweep)");
    add_flag(*c, "omega", "omega", "Heterogeneity multiplier (list for sweep)");
    add_flag(*c, "sizes", "sizes", "Comma-separated community sizes (unbalanced instances)");
    add_flag(*c, "k-range", "k_range", "Candidate K values, e.g. 2-6 or 2,3,5");
    add_flag(*c, "penalty", "penalty", "separable, nonseparable or empirical");
    add_flag(*c, "beta1", "beta1", "Support-complexity weight");
    add_flag(*c, "beta2", "beta2", "Clustering-complexity weight");
    add_flag(*c, "reps", "reps", "Repetitions");
    add_flag(*c, "workers", "workers", "Worker threads");
    add_flag(*c, "zero-tol", "zero_tol", "Zero threshold for estimated entries");
    add_flag(*c, "threshold", "threshold", "Weights > threshold become edges");
    add_flag(*c, "gamma1", "gamma1", "Elastic-net l1 weight (default 30 rho)");
    add_flag(*c, "gamma2", "gamma2", "Elastic-net ridge weight (default max(125 (1 - rho), 1))");
    add_flag(*c, "gamma1-cap-fraction", "gamma1_cap_fraction",
             "Cap the default gamma1 at this fraction of max |(A^T A)_ij|, 0 disables (default 0.5)");
    commands.push_back(std::move(c));
    return commands.back().get();
  };

  make("generate", "Generate a synthetic instance", kGenerateKeys);
  Command* fit = make("fit", "Cluster a network and estimate its probability matrix", kFitKeys);
  add_file(*fit, "adjacency", "Adjacency matrix file");
  add_file(*fit, "truth-labels", "Reference labels, enables the evaluation report");
  add_file(*fit, "truth-probability", "Reference probability matrix");
  make("sweep", "Run a grid of synthetic experiments", kSweepKeys);
  Command* sel = make("select-k", "Select the number of communities", kSelectKeys);
  add_file(*sel, "adjacency", "Adjacency matrix file (otherwise instances are generated)");
  Command* ing = make("ingest", "Convert an edge list or weighted matrix to an adjacency file", kIngestKeys);
  add_file(*ing, "edges", "Edge-list file");
  add_file(*ing, "matrix", "Weighted matrix file");
  Command* ev = make("evaluate", "Compare an estimate with a reference", kEvaluateKeys);
  add_file(*ev, "labels", "Estimated labels");
  add_file(*ev, "truth-labels", "Reference labels");
  add_file(*ev, "probability", "Estimated probability matrix");
  add_file(*ev, "truth-probability", "Reference probability matrix");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (const auto& c : commands) {
      if (!c->app->parsed()) continue;
      const Invocation inv = build(*c);
      if (c->name == "generate") cmd_generate(inv, out);
      else if (c->name == "fit") cmd_fit(inv, out);
      else if (c->name == "sweep") cmd_sweep(inv, out);
      else if (c->name == "select-k") cmd_select_k(inv, out, err);
      else if (c->name == "ingest") cmd_ingest(inv, out, err);
      else if (c->name == "evaluate") cmd_evaluate(inv, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const json::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace spabm::cli
