#include "gbart/cli.hpp"

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "gbart/bench.hpp"
#include "gbart/errors.hpp"
#include "gbart/grouping.hpp"
#include "gbart/serialize.hpp"

namespace gbart {

namespace {

struct ChainFlags {
  std::size_t ndpost = 1000;
  std::size_t burn_in = 100;

  void add(CLI::App& app) {
    app.add_option("--ndpost", ndpost, "Retained posterior draws")->capture_default_str();
    app.add_option("--burn-in", burn_in, "Discarded initial sweeps")->capture_default_str();
  }
  McmcConfig config() const {
    McmcConfig c;
    c.ndpost = ndpost;
    c.burn_in = burn_in;
    return c;
  }
};

struct DataFlags {
  std::string path;
  std::string target = "y";
  std::vector<std::string> drop;

  void add(CLI::App& app, bool required) {
    auto* opt = app.add_option("--data", path, "Input CSV with a header row");
    if (required) opt->required();
    app.add_option("--target", target, "Response column (name or zero-based index)")
        ->capture_default_str();
    app.add_option("--drop", drop, "Columns to ignore");
  }
  Dataset load() const { return load_csv(path, target, drop); }
};

std::string format_values(const std::vector<double>& values, const std::string& header) {
  std::string out = header + "\n";
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Grouped Bayesian additive regression trees"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Draw a synthetic benchmark dataset");
  int gen_case = 1;
  std::size_t gen_n = 500;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--case", gen_case, "Generator case 1-12")->required();
  gen->add_option("--n", gen_n, "Number of rows")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV")->required();

  // group-search
  auto* search = app.add_subcommand("group-search", "Discover a variable partition");
  DataFlags search_data;
  search_data.add(*search, false);
  int search_case = 0;
  std::size_t search_n = 500;
  std::uint64_t search_data_seed = 1;
  search->add_option("--case", search_case, "Use a synthetic case instead of --data");
  search->add_option("--n", search_n, "Rows for --case")->capture_default_str();
  search->add_option("--data-seed", search_data_seed, "Seed for --case")->capture_default_str();
  std::uint64_t search_seed_value = 1;
  std::string partition_out;
  std::string trace_out;
  GroupSearchConfig search_cfg;
  ChainFlags search_chain;
  search_chain.add(*search);
  search->add_option("--seed", search_seed_value, "Search seed")->capture_default_str();
  search->add_option("--trees", search_cfg.stage1_trees, "Trees per candidate fit")
      ->capture_default_str();
  search->add_option("--val-fraction", search_cfg.val_fraction, "Validation share")
      ->capture_default_str();
  search->add_option("--max-rounds", search_cfg.max_rounds, "Round cap")->capture_default_str();
  search->add_option("--workers", search_cfg.workers, "Threads (0 = all)")->capture_default_str();
  search->add_option("--out", partition_out, "Partition JSON")->required();
  search->add_option("--trace", trace_out, "Search trace (JSON lines)");
  search->callback([&] {
    if (search_case == 0 && search_data.path.empty()) {
      throw CLI::ValidationError("group-search", "either --data or --case is required");
    }
  });

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a model and write it as JSON");
  DataFlags fit_data;
  fit_data.add(*fit, true);
  ChainFlags fit_chain;
  fit_chain.add(*fit);
  std::string fit_partition;
  bool fit_search = false;
  std::size_t fit_trees = 200;
  std::uint64_t fit_seed = 1;
  std::string fit_out;
  fit->add_option("--partition", fit_partition, "Partition JSON (default: one group)");
  fit->add_flag("--search", fit_search, "Discover the partition first");
  fit->add_option("--trees", fit_trees, "Number of trees")->capture_default_str();
  fit->add_option("--seed", fit_seed, "Random seed")->capture_default_str();
  fit->add_option("--out", fit_out, "Model JSON")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "Posterior-mean predictions from a model");
  std::string pred_model;
  std::string pred_path;
  std::string pred_out;
  std::vector<std::string> pred_drop;
  pred->add_option("--model", pred_model, "Model JSON")->required();
  pred->add_option("--data", pred_path, "Predictor CSV")->required();
  pred->add_option("--drop", pred_drop, "Columns to ignore, e.g. the response");
  pred->add_option("--out", pred_out, "Predictions CSV")->required();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Cross-validated GBART vs BART comparison");
  std::string plan_path;
  std::string bench_csv;
  std::string bench_json;
  int bench_workers = -1;
  bench->add_option("--plan", plan_path, "Plan file (key=value)")->required();
  bench->add_option("--out-csv", bench_csv, "Result table CSV")->required();
  bench->add_option("--out-json", bench_json, "Result table JSON");
  bench->add_option("--workers", bench_workers, "Override the plan's worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() == 0) return 0;
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*gen) {
      write_csv(generate_synthetic(gen_case, gen_n, gen_seed), gen_out);
    } else if (*search) {
      const Dataset data = search_case ? generate_synthetic(search_case, search_n, search_data_seed)
                                       : search_data.load();
      search_cfg.stage1_mcmc = search_chain.config();
      const auto [partition, trace] = isg_search(data, search_cfg, search_seed_value);
      write_text_file(partition_out, partition_to_json(partition).dump() + "\n");
      if (!trace_out.empty()) write_text_file(trace_out, trace_to_jsonl(trace));
      std::cout << partition.to_string() << "\n";
    } else if (*fit) {
      const Dataset data = fit_data.load();
      const McmcConfig mcmc = fit_chain.config();
      FitResult result;
      if (!fit_partition.empty()) {
        const Partition partition = partition_from_json(read_json_file(fit_partition), data.p());
        result = fit_grouped(data, partition, fit_trees, mcmc, fit_seed);
      } else if (fit_search) {
        GroupSearchConfig cfg;
        cfg.stage2_trees = fit_trees;
        result = gbart_fit(data, cfg, mcmc, fit_seed).fit;
      } else {
        result = fit_grouped(data, Partition::trivial(data.p()), fit_trees, mcmc, fit_seed);
      }
      write_text_file(fit_out, model_to_json(result).dump() + "\n");
      std::cout << "partition " << result.partition.to_string() << "\n";
    } else if (*pred) {
      const FitResult model = model_from_json(read_json_file(pred_model));
      const Matrix X = load_csv_predictors(pred_path, pred_drop);
      write_text_file(pred_out, format_values(predict(model, X), "prediction"));
    } else if (*bench) {
      BenchmarkPlan plan = load_plan(plan_path);
      if (bench_workers >= 0) plan.workers = bench_workers;
      const ResultTable table = run_benchmark(plan);
      write_text_file(bench_csv, table.to_csv());
      if (!bench_json.empty()) write_text_file(bench_json, table.to_json());
      std::cout << table.to_csv();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace gbart
