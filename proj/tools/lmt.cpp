#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "lmt/errors.hpp"
#include "lmt/io.hpp"
#include "lmt/learner.hpp"
#include "lmt/solver.hpp"
#include "lmt/tasks.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kInfeasible = 1, kFormat = 2, kUsage = 3, kTimeout = 4 };

// Failures that map straight onto an exit code.
struct Abort {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Abort{kUsage, "cannot open '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Abort{kUsage, "cannot write '" + path.string() + "'"};
  out << text;
}

template <class F>
auto parsing(const std::string& path, F&& parse) {
  try {
    return parse(read_file(path));
  } catch (const lmt::ParseError& e) {
    throw Abort{kFormat, path + ":" + e.what()};
  } catch (const lmt::SortError& e) {
    throw Abort{kFormat, path + ": " + e.what()};
  } catch (const lmt::DomainError& e) {
    throw Abort{kFormat, path + ": " + e.what()};
  } catch (const lmt::DimensionError& e) {
    throw Abort{kFormat, path + ": " + e.what()};
  }
}

lmt::Problem load_problem(const std::string& path) {
  return parsing(path, [](const std::string& text) { return lmt::parse_problem(text); });
}

lmt::Rational rational_option(const std::string& text, const char* flag) {
  try {
    return lmt::parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw Abort{kUsage, std::string(flag) + ": " + e.what()};
  }
}

// ----- commands -----

struct SolveArgs {
  std::string problem;
  std::string mode = "auto";
  double timeout = 0;
};

int run_solve(const SolveArgs& args) {
  lmt::Problem problem = load_problem(args.problem);
  lmt::SolverOptions options;
  if (args.timeout > 0) options.timeout_seconds = args.timeout;
  lmt::Solution s;
  if (args.mode == "maxsmt") {
    try {
      s = lmt::solve_maxsmt(problem, options);
    } catch (const lmt::MixedCostKind& e) {
      throw Abort{kUsage, std::string("--mode maxsmt: ") + e.what()};
    }
  } else if (args.mode == "omt") {
    s = lmt::solve_omt(problem, options);
  } else {
    s = lmt::solve(problem, options);
  }
  std::cout << lmt::print_solution(s, problem);
  if (s.stats.timed_out) return kTimeout;
  return s.status == lmt::SolveStatus::kInfeasible ? kInfeasible : kOk;
}

struct TrainArgs {
  std::string problem;
  std::string data;
  std::string out;
  double c = 1;
  double eps = 1e-3;
  std::string tau = "0";
  std::size_t max_rounds = 500;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
  lmt::Problem problem = load_problem(args.problem);
  auto examples = parsing(args.data, [&](const std::string& t) { return lmt::parse_dataset(t, problem); });
  lmt::TrainingOptions options;
  options.c = args.c;
  options.epsilon = args.eps;
  options.tau = rational_option(args.tau, "--tau");
  options.max_rounds = args.max_rounds;
  lmt::TrainingResult result;
  try {
    result = lmt::train(problem, examples, options);
  } catch (const lmt::TrainingDataInfeasible& e) {
    throw Abort{kInfeasible, e.what()};
  } catch (const lmt::DomainError& e) {
    throw Abort{kUsage, e.what()};
  }
  write_file(args.out, lmt::print_model(result.model, problem));
  std::ostringstream log;
  log << "# seed=" << args.seed << " examples=" << examples.size() << "\n";
  log << "round added working_set qp_objective qp_gap\n";
  for (const lmt::TrainingRound& r : result.log) {
    log << r.round << " " << r.added << " " << r.working_set_size << " " << lmt::print_double(r.qp_objective)
        << " " << lmt::print_double(r.qp_gap) << "\n";
  }
  log << (result.converged ? "converged" : "stopped at the round limit") << "\n";
  write_file(args.out + ".log", log.str());
  std::cerr << "trained " << problem.soft.size() << " weights in " << result.log.size() << " rounds\n";
  return kOk;
}

struct PredictArgs {
  std::string problem;
  std::string model;
  std::string data;
  std::string out;
};

int run_predict(const PredictArgs& args) {
  lmt::Problem problem = load_problem(args.problem);
  lmt::ModelWeights model =
      parsing(args.model, [&](const std::string& t) { return lmt::parse_model(t, problem); });
  auto examples = parsing(args.data, [&](const std::string& t) { return lmt::parse_dataset(t, problem); });
  std::vector<lmt::Assignment> predictions;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    try {
      predictions.push_back(lmt::infer(model.weights, problem, examples[i].evidence));
    } catch (const lmt::InfeasibleError& e) {
      throw Abort{kInfeasible, "example " + std::to_string(i) + ": " + e.what()};
    }
  }
  write_file(args.out, lmt::print_predictions(predictions));
  return kOk;
}

struct EvalArgs {
  std::string pred;
  std::string gold;
  std::string tau = "0";
};

int run_eval(const EvalArgs& args) {
  auto predicted = parsing(args.pred, [](const std::string& t) { return lmt::parse_predictions(t); });
  auto examples = parsing(args.gold, [](const std::string& t) { return lmt::parse_dataset(t); });
  std::vector<lmt::Assignment> gold;
  for (const lmt::Example& e : examples) gold.push_back(e.gold);
  lmt::Metrics m;
  try {
    m = lmt::evaluate_predictions(predicted, gold, rational_option(args.tau, "--tau"));
  } catch (const lmt::DomainError& e) {
    throw Abort{kFormat, e.what()};
  }
  std::cout << "examples=" << m.examples << "\n"
            << "mean_hamming=" << lmt::to_string(m.mean_hamming) << "\n"
            << "bool_accuracy=" << lmt::to_string(m.bool_accuracy) << "\n"
            << "mean_abs_error=" << lmt::to_string(m.mean_abs_error) << "\n"
            << "exact_recovery=" << lmt::to_string(m.exact_recovery) << "\n";
  return kOk;
}

struct GenArgs {
  std::string task;
  std::uint64_t seed = 0;
  std::size_t n = 30;
  std::size_t n_test = 0;
  std::size_t size = 0;  // locations or activities; 0 keeps the default
  std::string out_dir;
};

int run_gen(const GenArgs& args) {
  lmt::Dataset data;
  try {
    if (args.task == "housing") {
      lmt::HousingConfig config;
      config.examples = args.n + args.n_test;
      if (args.size > 0) config.locations = args.size;
      data = lmt::gen_housing_dataset(config, args.seed);
    } else {
      lmt::ActivityConfig config;
      config.examples = args.n + args.n_test;
      if (args.size > 0) config.activities = args.size;
      data = lmt::gen_activity_dataset(config, args.seed);
    }
  } catch (const std::invalid_argument& e) {
    throw Abort{kUsage, e.what()};
  } catch (const lmt::GenerationError& e) {
    throw Abort{kInfeasible, e.what()};
  }
  fs::path dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Abort{kUsage, "cannot create '" + dir.string() + "': " + ec.message()};
  std::span<const lmt::Example> all(data.examples);
  write_file(dir / "problem.lmt", lmt::print_problem(data.problem));
  write_file(dir / "data.lmt", lmt::print_dataset(all.first(args.n)));
  if (args.n_test > 0) write_file(dir / "test.lmt", lmt::print_dataset(all.subspan(args.n)));
  lmt::ModelWeights truth{data.true_weights, 0, 0, 0};
  write_file(dir / "truth.model", lmt::print_model(truth, data.problem));
  return kOk;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LMT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Abort{kUsage, "LMT_SEED is not a nonnegative integer"};
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lmt: learning modulo theories over linear rational arithmetic"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "solve one MAX-SMT/OMT problem");
  solve_cmd->add_option("problem", solve.problem, "problem file")->required();
  solve_cmd->add_option("--mode", solve.mode)->check(CLI::IsMember({"auto", "maxsmt", "omt"}));
  solve_cmd->add_option("--timeout", solve.timeout, "seconds; the best world so far is printed")
      ->check(CLI::PositiveNumber);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "learn soft-constraint weights");
  train_cmd->add_option("--problem", train.problem)->required();
  train_cmd->add_option("--data", train.data)->required();
  train_cmd->add_option("--out", train.out, "model file; the log goes to OUT.log")->required();
  train_cmd->add_option("--C", train.c)->check(CLI::PositiveNumber);
  train_cmd->add_option("--eps", train.eps)->check(CLI::PositiveNumber);
  train_cmd->add_option("--tau", train.tau, "tolerance for Real outputs in the loss");
  train_cmd->add_option("--max-rounds", train.max_rounds);
  auto* train_seed = train_cmd->add_option("--seed", train.seed);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "infer outputs with a trained model");
  predict_cmd->add_option("--problem", predict.problem)->required();
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--data", predict.data)->required();
  predict_cmd->add_option("--out", predict.out)->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "compare predictions with gold outputs");
  eval_cmd->add_option("--pred", eval.pred)->required();
  eval_cmd->add_option("--gold", eval.gold)->required();
  eval_cmd->add_option("--tau", eval.tau);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic task");
  gen_cmd->add_option("--task", gen.task)->required()->check(CLI::IsMember({"housing", "activity"}));
  auto* gen_seed = gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--n", gen.n, "training examples");
  gen_cmd->add_option("--n-test", gen.n_test, "held-out examples written to test.lmt");
  gen_cmd->add_option("--size", gen.size, "locations (housing) or activities (activity)");
  gen_cmd->add_option("--out-dir", gen.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (train_seed->count() == 0) train.seed = default_seed();
    if (gen_seed->count() == 0) gen.seed = default_seed();
    if (*solve_cmd) return run_solve(solve);
    if (*train_cmd) return run_train(train);
    if (*predict_cmd) return run_predict(predict);
    if (*eval_cmd) return run_eval(eval);
    if (*gen_cmd) return run_gen(gen);
  } catch (const Abort& a) {
    std::cerr << "lmt: " << a.message << "\n";
    return a.code;
  } catch (const lmt::InfeasibleError& e) {
    std::cerr << "lmt: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "lmt: " << e.what() << "\n";
    return kFormat;
  }
  return kUsage;
}
