#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "riskpref/error.hpp"
#include "riskpref/evaluation.hpp"
#include "riskpref/interface.hpp"

namespace riskpref::interface {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct PipelineArgs {
  std::string data;
  std::string target = "mpl_avg_safe";
  double test_fraction = 0.2;
  int strata = 10;
  double smoothing = 1.0;
  int impute_rounds = 10;
  std::size_t folds = 10;
  std::string metric = "mape";
  unsigned threads = 0;
};

void add_pipeline_options(CLI::App& cmd, PipelineArgs& a, bool cv) {
  cmd.add_option("--data", a.data, "Input CSV")->required()->check(CLI::ExistingFile);
  cmd.add_option("--target", a.target, "mpl_avg_safe or risk_grq")->capture_default_str();
  cmd.add_option("--test-fraction", a.test_fraction, "Held-out fraction")->capture_default_str();
  cmd.add_option("--strata", a.strata, "Target bins for the stratified split")->capture_default_str();
  cmd.add_option("--smoothing", a.smoothing, "M-estimate smoothing mass")->capture_default_str();
  cmd.add_option("--impute-rounds", a.impute_rounds, "Iterative imputation rounds")->capture_default_str();
  if (cv) {
    cmd.add_option("--folds", a.folds, "Cross-validation folds")->capture_default_str();
    cmd.add_option("--metric", a.metric, "Selection metric (mae, mse, rmse, r2, rmsle, mape)")->capture_default_str();
    cmd.add_option("--threads", a.threads, "Worker threads (0: all cores)")->capture_default_str();
  }
}

evaluation::PipelineConfig pipeline_config(const PipelineArgs& a, std::uint64_t seed) {
  evaluation::PipelineConfig c;
  c.target = parse_target(a.target);
  c.split.test_fraction = a.test_fraction;
  c.split.strata_bins = a.strata;
  c.split.seed = seed;
  c.smoothing = a.smoothing;
  c.impute.max_rounds = a.impute_rounds;
  c.cv.folds = a.folds;
  c.cv.seed = seed;
  c.cv.metric = evaluation::parse_metric(a.metric);
  c.cv.threads = a.threads;
  return c;
}

DataTable load(const std::string& path) { return read_csv_file(path, &register_schema()); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path, "--config");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what(), "--config");
  }
}

models::Params parse_params(const std::vector<std::string>& items) {
  models::Params out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("expected name=value, got '" + item + "'", "--param");
    const std::string value = item.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw ValidationError("not a number: '" + value + "'", "--param");
    }
    out[item.substr(0, eq)] = v;
  }
  return out;
}

json metrics_json(const evaluation::Metrics& m) {
  return {{"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}, {"r2", m.r2}, {"rmsle", m.rmsle}, {"mape", m.mape}};
}

// Sheet files hold one "<task_id> <choices>" pair per line ('#' starts a
// comment), or a JSON array of {"task_id", "choices"} objects.
std::vector<elicitation::ChoiceSheet> read_sheets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path, "--sheets");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<elicitation::ChoiceSheet> sheets;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ": " + e.what(), "--sheets");
    }
    if (doc.is_object()) doc = doc.value("sheets", json::array());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& item = doc[i];
      if (!item.is_object() || !item.contains("task_id") || !item["task_id"].is_number_integer() ||
          !item.contains("choices") || !item["choices"].is_string()) {
        throw ValidationError("expected {\"task_id\": int, \"choices\": string}", fmt::format("sheets[{}]", i));
      }
      sheets.push_back(
          elicitation::ChoiceSheet::parse(item["task_id"].get<int>(), item["choices"].get<std::string>()));
    }
    return sheets;
  }
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int task_id = 0;
    std::string choices;
    if (!(fields >> task_id)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ValidationError(fmt::format("line {}: expected '<task_id> <choices>'", line_no), "--sheets");
    }
    if (!(fields >> choices)) throw ValidationError(fmt::format("line {}: missing choices", line_no), "--sheets");
    sheets.push_back(elicitation::ChoiceSheet::parse(task_id, choices));
  }
  return sheets;
}

std::pair<std::string, int> default_bind() {
  std::string host = "127.0.0.1";
  int port = 8080;
  if (const char* env = std::getenv("RISKPREF_BIND"); env && *env) {
    const std::string v = env;
    const auto colon = v.rfind(':');
    if (colon == std::string::npos) {
      host = v;
    } else {
      if (colon > 0) host = v.substr(0, colon);
      try {
        port = std::stoi(v.substr(colon + 1));
      } catch (const std::exception&) {
        throw ValidationError("RISKPREF_BIND must look like host:port", "RISKPREF_BIND");
      }
    }
  }
  return {host, port};
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk-preference elicitation and prediction toolkit", "riskpref"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::uint64_t seed = 0;
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "Seed for all randomness")->capture_default_str(); };

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic register dataset as CSV");
  std::size_t rows = 1000;
  std::string gen_out = "-";
  std::string schema_out;
  std::string truth_out;
  std::string gen_target = "both";
  bool no_missing = false;
  std::optional<double> noise;
  gen->add_option("--rows", rows, "Number of rows")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV ('-' for stdout)")->capture_default_str();
  gen->add_option("--schema-out", schema_out, "Write the feature schema as JSON");
  gen->add_option("--truth-out", truth_out, "Write the planted coefficients as JSON");
  gen->add_option("--target", gen_target, "both, mpl_avg_safe or risk_grq")->capture_default_str();
  gen->add_option("--noise", noise, "Noise standard deviation");
  gen->add_flag("--no-missing", no_missing, "Skip MCAR masking");
  add_seed(gen);

  // impute
  auto* imp = app.add_subcommand("impute", "Encode categoricals and fill missing cells");
  std::string imp_data;
  std::string imp_out = "-";
  std::string imp_target = "mpl_avg_safe";
  std::string imp_report;
  double imp_smoothing = 1.0;
  preprocess::ImputeConfig imp_config;
  imp->add_option("--data", imp_data, "Input CSV")->required()->check(CLI::ExistingFile);
  imp->add_option("--out", imp_out, "Output CSV ('-' for stdout)")->capture_default_str();
  imp->add_option("--target", imp_target, "Target used by the M-estimate encoder")->capture_default_str();
  imp->add_option("--smoothing", imp_smoothing, "M-estimate smoothing mass")->capture_default_str();
  imp->add_option("--max-rounds", imp_config.max_rounds, "Imputation rounds")->capture_default_str();
  imp->add_option("--tol", imp_config.tol, "Stop when the largest cell change is below this")->capture_default_str();
  imp->add_option("--report", imp_report, "Write an imputation report as JSON");
  add_seed(imp);

  // train
  auto* train = app.add_subcommand("train", "Fit one model spec and score it on the held-out rows");
  PipelineArgs train_args;
  std::string family;
  std::vector<std::string> params;
  std::string model_out;
  add_pipeline_options(*train, train_args, false);
  train->add_option("--family", family, "Model family key, e.g. lasso")->required();
  train->add_option("--param", params, "Hyperparameter override name=value (repeatable)");
  train->add_option("--model-out", model_out, "Write the fitted model as JSON");
  add_seed(train);

  // leaderboard
  auto* lb = app.add_subcommand("leaderboard", "Tune and compare every model family");
  PipelineArgs lb_args;
  std::string lb_dir;
  std::string config_path;
  std::vector<std::string> families;
  add_pipeline_options(*lb, lb_args, true);
  lb->add_option("--out-dir", lb_dir, "Directory for report files")->required();
  lb->add_option("--config", config_path, "JSON file overriding default grids")->check(CLI::ExistingFile);
  lb->add_option("--families", families, "Restrict to these family keys");
  add_seed(lb);

  // rfecv
  auto* rf = app.add_subcommand("rfecv", "Recursive feature elimination with cross-validation");
  PipelineArgs rf_args;
  std::string rf_family = "lasso";
  std::vector<std::string> rf_params;
  std::string rf_dir;
  add_pipeline_options(*rf, rf_args, true);
  rf->add_option("--family", rf_family, "Model family key")->capture_default_str();
  rf->add_option("--param", rf_params, "Hyperparameter override name=value (repeatable)");
  rf->add_option("--out-dir", rf_dir, "Directory for report files")->required();
  add_seed(rf);

  // score-mpl
  auto* sm = app.add_subcommand("score-mpl", "Score a file of MPL choice sheets");
  std::string sheets_path;
  bool sm_json = false;
  sm->add_option("sheets", sheets_path, "Sheet file")->required()->check(CLI::ExistingFile);
  sm->add_flag("--json", sm_json, "Print the full report as JSON");
  add_seed(sm);

  // serve
  auto* sv = app.add_subcommand("serve", "Run the elicitation HTTP service");
  std::string host;
  int port = 0;
  std::string log_dir;
  sv->add_option("--host", host, "Bind address (default from RISKPREF_BIND or 127.0.0.1)");
  sv->add_option("--port", port, "Port (default from RISKPREF_BIND or 8080)");
  sv->add_option("--log-dir", log_dir, "Directory for session event logs");
  add_seed(sv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      GenConfig cfg = default_gen_config(rows, seed);
      if (noise) cfg.noise_sd = *noise;
      if (gen_target == "both") {
        cfg.target = GenTarget::both;
      } else {
        cfg.target = parse_target(gen_target) == TargetKind::mpl_avg_safe ? GenTarget::mpl_avg_safe
                                                                          : GenTarget::risk_grq;
      }
      const auto& schema = register_schema();
      auto [table, truth] = generate(schema, cfg);
      if (!no_missing) table = apply_missingness(table, schema, seed);
      if (gen_out == "-") {
        write_csv(table, out);
      } else {
        write_csv_file(table, gen_out);
      }
      if (!schema_out.empty()) write_text(schema_out, schema_to_json(schema).dump(2) + "\n");
      if (!truth_out.empty()) {
        json coefs = json::object();
        for (const auto& [name, c] : truth.coefficients) coefs[name] = c;
        write_text(truth_out, json{{"intercept", truth.intercept},
                                   {"coefficients", coefs},
                                   {"informative", truth.informative}}
                                      .dump(2) +
                                  "\n");
      }
      return 0;
    }

    if (imp->parsed()) {
      imp_config.validate();
      const DataTable table = load(imp_data);
      const auto& target = table.target(parse_target(imp_target));
      const auto encoder = preprocess::fit_mestimate(table, target, imp_smoothing);
      const auto result = preprocess::iterative_impute(preprocess::encode(encoder, table), imp_config, seed);
      if (imp_out == "-") {
        write_csv(result.table, out);
      } else {
        write_csv_file(result.table, imp_out);
      }
      if (!imp_report.empty()) write_text(imp_report, preprocess::impute_report_json(imp_config, result).dump(2) + "\n");
      return 0;
    }

    if (train->parsed()) {
      const auto cfg = pipeline_config(train_args, seed);
      const models::ModelSpec spec{models::parse_family(family), parse_params(params), seed};
      models::validate(spec);
      const auto data = evaluation::prepare(load(train_args.data), cfg);
      const auto model = models::fit(spec, data.x_train, data.y_train);
      const models::Vector pred = model.predict(data.x_test);
      const auto m = evaluation::metrics({data.y_test.data(), static_cast<std::size_t>(data.y_test.size())},
                                         {pred.data(), static_cast<std::size_t>(pred.size())});
      out << json{{"model", models::describe(spec)},
                  {"split", evaluation::split_descriptor(cfg, data)},
                  {"test", metrics_json(m)}}
                 .dump(2)
          << "\n";
      if (!model_out.empty()) write_text(model_out, models::model_to_json(model).dump(2) + "\n");
      return 0;
    }

    if (lb->parsed()) {
      const auto cfg = pipeline_config(lb_args, seed);
      auto grids = evaluation::default_grids(seed);
      if (!config_path.empty()) {
        json overrides = read_json_file(config_path);
        if (overrides.is_object() && overrides.contains("grids")) overrides = overrides["grids"];
        grids = evaluation::apply_grid_overrides(std::move(grids), overrides, seed);
      }
      if (!families.empty()) {
        std::vector<evaluation::FamilyGrid> keep;
        for (const auto& name : families) {
          const auto f = models::parse_family(name);
          for (const auto& g : grids) {
            if (g.family == f) keep.push_back(g);
          }
        }
        grids = std::move(keep);
      }
      const auto data = evaluation::prepare(load(lb_args.data), cfg);
      const auto report = evaluation::leaderboard(grids, data.x_train, data.y_train, data.x_test, data.y_test, cfg.cv,
                                                  evaluation::split_descriptor(cfg, data));
      const fs::path dir(lb_dir);
      fs::create_directories(dir);
      const std::string text = evaluation::leaderboard_text(report);
      write_text(dir / "leaderboard.txt", text);
      write_text(dir / "leaderboard.csv", evaluation::leaderboard_csv(report));
      write_text(dir / "leaderboard.json", evaluation::leaderboard_json(report).dump(2) + "\n");

      std::map<std::string, std::vector<double>> fold_scores;
      for (const auto& row : report.rows) {
        if (row.cv_fold_scores.size() >= 4) {
          fold_scores[std::string(models::display_name(row.family))] = row.cv_fold_scores;
        }
        if (row.family == models::Family::lasso && row.model) {
          const auto imp = evaluation::lasso_importance(*row.model, data.feature_names);
          write_text(dir / "lasso_importance.csv", evaluation::lasso_importance_csv(imp));
        }
      }
      if (!fold_scores.empty()) {
        const auto boxes = evaluation::fold_distribution_export(fold_scores);
        write_text(dir / "fold_distribution.csv", evaluation::fold_distribution_csv(boxes));
        write_text(dir / "fold_distribution.json", evaluation::fold_distribution_json(boxes).dump(2) + "\n");
      }
      out << text;
      return 0;
    }

    if (rf->parsed()) {
      const auto cfg = pipeline_config(rf_args, seed);
      const models::ModelSpec spec{models::parse_family(rf_family), parse_params(rf_params), seed};
      models::validate(spec);
      const auto data = evaluation::prepare(load(rf_args.data), cfg);
      const auto result = evaluation::rfecv(spec, data.x_train, data.y_train, cfg.cv);
      auto names = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::string> n;
        for (const auto i : idx) n.push_back(data.feature_names[i]);
        return n;
      };
      json steps = json::array();
      std::string csv = "n_features,mean_score\n";
      for (const auto& s : result.steps) {
        steps.push_back({{"n_features", s.features.size()},
                         {"features", names(s.features)},
                         {"mean_score", s.mean_score},
                         {"fold_scores", s.fold_scores}});
        csv += fmt::format("{},{}\n", s.features.size(), s.mean_score);
      }
      const json doc = {{"model", models::describe(spec)},
                        {"metric", evaluation::to_string(result.metric)},
                        {"selected", names(result.selected)},
                        {"elimination_order", names(result.elimination_order)},
                        {"steps", steps}};
      const fs::path dir(rf_dir);
      fs::create_directories(dir);
      write_text(dir / "rfecv.json", doc.dump(2) + "\n");
      write_text(dir / "rfecv_curve.csv", csv);
      out << fmt::format("selected {} of {} features ({} {:.4f})\n", result.selected.size(),
                         data.feature_names.size(), evaluation::to_string(result.metric), result.best().mean_score);
      for (const auto& n : names(result.selected)) out << "  " << n << "\n";
      return 0;
    }

    if (sm->parsed()) {
      const auto sheets = read_sheets(sheets_path);
      const double avg = elicitation::avg_safe(sheets);
      if (sm_json) {
        json per_task = json::array();
        for (const auto& s : sheets) {
          const auto r = elicitation::consistency(s);
          per_task.push_back({{"task_id", s.task_id},
                              {"safe_count", elicitation::count_safe(s)},
                              {"switch_count", r.switch_count},
                              {"multiple_switch", r.multiple_switch},
                              {"dominated_choices", r.dominated_choices}});
        }
        out << json{{"mpl_avg_safe", avg}, {"per_task", per_task}}.dump(2) << "\n";
      } else {
        out << fmt::format("{:.1f}\n", avg);
      }
      return 0;
    }

    if (sv->parsed()) {
      auto [bind_host, bind_port] = default_bind();
      if (!host.empty()) bind_host = host;
      if (port != 0) bind_port = port;
      SessionStore store(log_dir.empty() ? std::nullopt : std::optional<fs::path>(log_dir), seed);
      err << fmt::format("listening on {}:{}\n", bind_host, bind_port);
      serve(bind_host, bind_port, store);
      return 0;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what();
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace riskpref::interface
