// semchain: find chains of reasoning between terms of an embedded
// knowledge base, or rank candidate completions, or run the synthetic
// recovery experiments.

#include "semchain/expharness.hpp"
#include "semchain/reasoner.hpp"
#include "semchain/rng.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kEmpty = 2;

struct SolverOptions {
  std::string method = "lasso";
  semchain::SolverConfig cfg;
  bool signed_weights = false;

  void attach(CLI::App& app) {
    app.add_option("--method", method, "Solver: lasso or omp")
        ->check(CLI::IsMember({"lasso", "omp"}));
    app.add_option("--max-atoms", cfg.max_atoms, "Support size cap");
    app.add_option("--lambda", cfg.lambda, "Regularization strength");
    app.add_option("--alpha", cfg.elastic_net_alpha,
                   "Elastic-net mix (1 = pure L1)");
    app.add_flag("--signed", signed_weights, "Allow negative weights");
    app.add_option("--weight-floor", cfg.weight_floor,
                   "Prune weights below this");
    app.add_option("--max-iterations", cfg.max_iterations,
                   "Solver iteration cap");
    app.add_option("--tol", cfg.convergence_tol, "Convergence tolerance");
  }

  semchain::SolverConfig resolve() const {
    semchain::SolverConfig out = cfg;
    out.method = method == "omp" ? semchain::SolveMethod::kOmp
                                 : semchain::SolveMethod::kLasso;
    out.nonnegative = !signed_weights;
    return out;
  }
};

struct KbOptions {
  std::string embeddings_path;
  std::string triples_path;
  bool raw = false;
  std::string on_missing = "skip";
  std::vector<std::string> predicates;
  std::vector<std::string> categories;  // name=member1,member2,...

  void attach(CLI::App& app, bool triples_required) {
    app.add_option("--embeddings", embeddings_path, "Word-vector text file")
        ->required();
    auto* t = app.add_option("--triples", triples_path,
                             "Tab-separated head/predicate/tail file");
    if (triples_required) t->required();
    app.add_flag("--raw", raw, "Keep vectors unnormalized at load");
    app.add_option("--on-missing", on_missing,
                   "Triples with unknown terms: skip or error")
        ->check(CLI::IsMember({"skip", "error"}));
    app.add_option("--predicates", predicates,
                   "Keep only these predicates (comma separated)")
        ->delimiter(',');
    app.add_option("--category", categories,
                   "Add a category term: name=member1,member2,...");
  }
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct Session {
  semchain::EmbeddingStore store;
  std::optional<semchain::FactDictionary> dict;
  std::size_t skipped = 0;
};

Session load_session(const KbOptions& kb, bool need_dict) {
  Session s{semchain::load_embeddings_file(kb.embeddings_path, !kb.raw), {}, 0};

  for (const std::string& spec : kb.categories) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("--category expects name=member1,member2,...");
    const std::string name = spec.substr(0, eq);
    const std::vector<std::string> members = split_csv(spec.substr(eq + 1));
    s.store.add(name, semchain::category_vector(s.store, members));
  }

  if (need_dict) {
    const auto policy = kb.on_missing == "error"
                            ? semchain::MissingPolicy::kError
                            : semchain::MissingPolicy::kSkip;
    auto ingested =
        semchain::ingest_triples_file(kb.triples_path, s.store, policy);
    s.skipped = ingested.skipped;
    std::optional<std::set<std::string>> filter;
    if (!kb.predicates.empty())
      filter.emplace(kb.predicates.begin(), kb.predicates.end());
    s.dict = semchain::FactDictionary::build(s.store, ingested.triples,
                                             std::move(filter));
  }
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning chains over semantically embedded knowledge bases"};
  app.require_subcommand(1);

  // prove
  auto* prove = app.add_subcommand("prove", "Chain from one term to another");
  KbOptions prove_kb;
  SolverOptions prove_solver;
  std::string prove_from, prove_to;
  double prove_epsilon = 1e-4, prove_pair_tol = 0.35;
  std::string prove_json, prove_dict_csv, prove_solution_csv;
  prove_kb.attach(*prove, true);
  prove_solver.attach(*prove);
  prove->add_option("--from", prove_from, "Starting term")->required();
  prove->add_option("--to", prove_to, "Target term")->required();
  prove->add_option("--epsilon", prove_epsilon, "Cost of a selected-fact edge");
  prove->add_option("--pair-tol", prove_pair_tol,
                    "Offset tolerance for analogy relabeling");
  prove->add_option("--json", prove_json, "Write the chain as JSON here");
  prove->add_option("--dict-csv", prove_dict_csv,
                    "Dump the fact dictionary here");
  prove->add_option("--solution-csv", prove_solution_csv,
                    "Dump the selected facts here");

  // ask
  auto* ask = app.add_subcommand("ask", "Rank candidate completions");
  KbOptions ask_kb;
  SolverOptions ask_solver;
  std::string ask_from;
  std::vector<std::string> ask_candidates;
  ask_kb.attach(*ask, true);
  ask_solver.attach(*ask);
  ask->add_option("--from", ask_from, "Given term")->required();
  ask->add_option("--candidates", ask_candidates,
                  "Candidate terms (comma separated)")
      ->required()
      ->delimiter(',');

  // experiment
  auto* exp = app.add_subcommand("experiment", "Synthetic recovery sweeps");
  KbOptions exp_kb;
  SolverOptions exp_solver;
  int exp_id = 0;
  semchain::TrialConfig trial;
  std::string exp_out;
  bool exp_have_kb = false;
  exp->add_option("--exp", exp_id, "Which experiment: 1, 2 or 3")
      ->required()
      ->check(CLI::Range(1, 3));
  exp->add_option("--dict-sizes", trial.dict_sizes,
                  "Dictionary sizes to sweep")
      ->delimiter(',');
  exp->add_option("--k", trial.counts, "Terms/facts/path lengths to sweep")
      ->delimiter(',');
  exp->add_option("--trials", trial.trials, "Trials per cell");
  exp->add_option("--dim", trial.dimension, "Embedding dimension");
  exp->add_option("--seed", trial.seed, "Base seed");
  exp->add_option("--neighbor-k", trial.neighbor_k,
                  "Neighborhood size for the nn metric");
  exp->add_option("--entities", trial.entity_count,
                  "Synthetic entity pool (experiments 2 and 3)");
  exp->add_option("--out", exp_out, "Report CSV path")->required();
  auto* exp_emb = exp->add_option("--embeddings", exp_kb.embeddings_path,
                                  "Real embeddings for experiment 3");
  exp->add_option("--triples", exp_kb.triples_path,
                  "Real triples for experiment 3")
      ->needs(exp_emb);
  exp_solver.attach(*exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return kUsage;
  }

  try {
    if (prove->parsed()) {
      if (prove_from == prove_to) {
        std::cerr << "prove: --from and --to must differ\n";
        return kUsage;
      }
      const Session s = load_session(prove_kb, true);
      if (s.skipped)
        std::cerr << "note: skipped " << s.skipped
                  << " triples with unknown terms\n";
      const semchain::SolverConfig cfg = prove_solver.resolve();

      const semchain::Goal goal =
          semchain::goal_vector(s.store, prove_from, prove_to);
      const semchain::SparseSolution sol =
          semchain::solve(*s.dict, goal.vec, cfg);
      semchain::ReasoningChain chain = semchain::order_chain(
          sol, *s.dict, s.store, prove_from, prove_to, prove_epsilon);
      chain = semchain::classify_links(std::move(chain), sol, *s.dict, s.store,
                                       prove_pair_tol);

      std::cout << semchain::render_chain(chain, *s.dict);
      if (!prove_json.empty())
        write_file(prove_json, semchain::chain_to_json(chain, *s.dict) + "\n");
      if (!prove_dict_csv.empty()) {
        std::ostringstream out;
        s.dict->export_csv(out);
        write_file(prove_dict_csv, out.str());
      }
      if (!prove_solution_csv.empty()) {
        std::ostringstream out;
        semchain::export_solution_csv(out, sol, *s.dict);
        write_file(prove_solution_csv, out.str());
      }
      return sol.weights.empty() ? kEmpty : kOk;
    }

    if (ask->parsed()) {
      const Session s = load_session(ask_kb, true);
      if (s.skipped)
        std::cerr << "note: skipped " << s.skipped
                  << " triples with unknown terms\n";
      const semchain::AnswerRanking ranking = semchain::ask(
          s.store, *s.dict, ask_from, ask_candidates, ask_solver.resolve());
      std::cout << semchain::render_ranking(ranking, *s.dict);
      return ranking.entries.empty() ? kEmpty : kOk;
    }

    // experiment
    trial.solver = exp_solver.resolve();
    if (trial.dict_sizes.empty()) trial.dict_sizes = {1000};
    if (trial.counts.empty())
      trial.counts = exp_id == 3 ? std::vector<std::size_t>{1, 2, 3}
                                 : std::vector<std::size_t>{1, 2, 3, 4, 5};
    semchain::TrialReport report;
    if (exp_id == 1) {
      report = semchain::exp1_term_recovery(trial);
    } else if (exp_id == 2) {
      report = semchain::exp2_fact_recovery(trial);
    } else {
      exp_have_kb = !exp_kb.embeddings_path.empty();
      if (exp_have_kb) {
        const Session s = load_session(exp_kb, true);
        report = semchain::exp3_path_recovery(trial, *s.dict);
      } else {
        // Synthetic KB: dict_sizes[0] facts over an entity pool.
        const std::size_t facts = trial.dict_sizes[0];
        const std::size_t entities = trial.entity_count
                                         ? trial.entity_count
                                         : std::max<std::size_t>(
                                               facts * 3 / 10, 16);
        const semchain::EmbeddingStore store = semchain::synth_embeddings(
            entities, trial.dimension,
            semchain::mix_seed({trial.seed, facts, 0xE30}));
        const std::vector<semchain::Triple> triples = semchain::synth_triples(
            store, facts, semchain::mix_seed({trial.seed, facts, 0xE31}));
        const semchain::FactDictionary kb =
            semchain::FactDictionary::build(store, triples);
        report = semchain::exp3_path_recovery(trial, kb);
      }
    }

    std::ostringstream csv;
    semchain::write_report_csv(csv, report);
    write_file(exp_out, csv.str());
    std::cout << csv.str();
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
