#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bern/experiments.hpp"
#include "bern/function_spec.hpp"
#include "bern/operators.hpp"
#include "bern/tails.hpp"

namespace {

constexpr const char* kVersion = "berncli 1.0.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

// Cell values are already formatted strings.
struct Table {
  std::vector<std::string> meta;  // header comment lines, without '#'
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void emit(const Table& table, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::json doc;
    doc["meta"] = table.meta;
    doc["columns"] = table.columns;
    doc["rows"] = table.rows;
    out << doc.dump(2) << "\n";
    return;
  }
  for (const auto& m : table.meta) out << "# " << m << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bern::FunctionSpec load_function_spec(const std::string& arg) {
  std::string text = arg;
  if (arg.size() > 1 && arg.front() == '@')
    text = read_file(arg.substr(1));
  else if (file_exists(arg))
    text = read_file(arg);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return bern::parse_function_spec_json(text);
  return bern::parse_function_spec(text);
}

std::vector<std::int64_t> parse_grid(const std::string& list) {
  std::vector<std::int64_t> grid;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    grid.push_back(std::stoll(item));
  if (grid.empty()) throw std::runtime_error("empty n grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::runtime_error("n grid must be strictly increasing");
  return grid;
}

struct Options {
  std::string format = "csv";
  std::string output_path;
  std::uint64_t seed = 12345;

  std::string function_arg;
  std::string n_list;
  double x = 0.5;
  double a = 0.0, b = 1.0, c = 0.0;
  double threshold = 0.5;
  std::string side = "upper";
  std::int64_t k = 0;
  std::string w_kind = "irwin_hall";
  double w_point = 0.0;
  double s = 1.0;
  double alpha = 0.5;
  std::int64_t sharp_k = 1, sharp_m = 2;
  std::string experiment_name;
};

std::vector<std::string> config_echo(const std::vector<std::string>& argv_echo) {
  std::string joined;
  for (const auto& a : argv_echo) {
    if (!joined.empty()) joined += " ";
    joined += a;
  }
  return {kVersion, "config: " + joined};
}

bern::PerturbationSpec make_law(const Options& opt) {
  if (opt.w_kind == "irwin_hall") return bern::PerturbationSpec::irwin_hall();
  if (opt.w_kind == "point_mass")
    return bern::PerturbationSpec::point_mass(opt.w_point);
  throw std::runtime_error("unknown perturbation kind: " + opt.w_kind);
}

std::string logcell(const bern::LogValue& v) { return fmt(v.log_mag); }

int run_eval(const Options& opt, Table& table) {
  const bern::FunctionSpec f = load_function_spec(opt.function_arg);
  table.columns = {"n", "k", "x", "value"};
  for (std::int64_t n : parse_grid(opt.n_list)) {
    double value;
    if (opt.k == 0) {
      value = bern::bernstein_eval(f, n, opt.x);
    } else {
      bern::OperatorParams params{n, opt.k, opt.x};
      value = bern::kantorovich_eval(f, params, make_law(opt));
    }
    table.rows.push_back({fmt(n), fmt(opt.k), fmt(opt.x), fmt(value)});
  }
  return 0;
}

int run_bounds(const Options& opt, Table& table) {
  table.columns = {"n",       "x",        "threshold",
                   "side",    "exact_sign", "exact_log",
                   "chernoff_log", "ferrante_log", "ferrante_applicable",
                   "kl_rate"};
  const bern::TailSide side =
      opt.side == "lower" ? bern::TailSide::Lower : bern::TailSide::Upper;
  for (std::int64_t n : parse_grid(opt.n_list)) {
    bern::TailQuery query{n, opt.x, opt.threshold, side};
    const bern::TailBoundReport report = bern::bound_report(query);
    table.rows.push_back(
        {fmt(n), fmt(opt.x), fmt(opt.threshold), opt.side,
         std::to_string(report.exact.sign), logcell(report.exact),
         logcell(report.chernoff),
         report.ferrante ? logcell(*report.ferrante) : std::string(),
         report.ferrante_applicable ? "true" : "false", fmt(report.kl_rate)});
  }
  return 0;
}

int run_verify(const Options& opt, Table& table) {
  const bern::FunctionSpec f = load_function_spec(opt.function_arg);
  table.columns = {"n", "x", "a", "b", "c", "error_log", "bound_log", "holds",
                   "slack"};
  bool all_hold = true;
  for (std::int64_t n : parse_grid(opt.n_list)) {
    bern::BoundCheck check;
    if (opt.k == 0) {
      check = bern::locally_constant_check(f, opt.c, opt.a, opt.b, n, opt.x);
    } else {
      bern::OperatorParams params{n, opt.k, opt.x};
      check = bern::kantorovich_check(f, opt.c, opt.a, opt.b, params,
                                      make_law(opt));
    }
    all_hold = all_hold && check.holds;
    table.rows.push_back({fmt(n), fmt(opt.x), fmt(opt.a), fmt(opt.b),
                          fmt(opt.c), logcell(check.error),
                          logcell(check.bound), check.holds ? "true" : "false",
                          fmt(check.slack)});
  }
  return all_hold ? 0 : 1;
}

int run_decay(const Options& opt, Table& table) {
  const bern::FunctionSpec f = load_function_spec(opt.function_arg);
  std::vector<bern::BoundCheck> checks;
  for (std::int64_t n : parse_grid(opt.n_list))
    checks.push_back(
        bern::locally_constant_check(f, opt.c, opt.a, opt.b, n, opt.x));
  const bern::DecayFit fit = bern::decay_fit(checks);
  table.columns = {"n", "neg_log_error", "slope", "intercept", "max_residual",
                   "degenerate"};
  for (std::size_t i = 0; i < fit.n_grid.size(); ++i)
    table.rows.push_back({fmt(fit.n_grid[i]), fmt(fit.neg_log_errors[i]),
                          fmt(fit.slope), fmt(fit.intercept),
                          fmt(fit.max_residual),
                          fit.degenerate ? "true" : "false"});
  return 0;
}

int run_experiment(const Options& opt, Table& table) {
  const std::vector<std::int64_t> grid = parse_grid(opt.n_list);
  if (opt.experiment_name == "sharpness") {
    table.columns = {"N", "exact_log", "asymptotic_log", "ratio"};
    for (const auto& row :
         bern::sharpness_run(opt.sharp_k, opt.sharp_m, opt.x, grid))
      table.rows.push_back({fmt(row.big_n), logcell(row.exact),
                            logcell(row.asymptotic), fmt(row.ratio)});
    return 0;
  }
  if (opt.experiment_name == "boundary") {
    table.columns = {"n", "scaled", "limit_constant", "symmetry_gap"};
    const bern::BoundaryResult result = bern::boundary_run(opt.s, grid);
    for (const auto& row : result.rows)
      table.rows.push_back({fmt(row.n), fmt(row.scaled),
                            fmt(result.limit_constant),
                            fmt(row.symmetry_gap)});
    return 0;
  }
  if (opt.experiment_name == "herzog_hill") {
    table.columns = {"n", "value", "gap"};
    for (const auto& row : bern::herzog_hill_run(opt.b, grid))
      table.rows.push_back(
          {fmt(row.n), fmt(row.value), fmt(std::abs(row.value - 0.5))});
    return 0;
  }
  if (opt.experiment_name == "dloc") {
    table.columns = {"n", "log_error", "paper_lower_bound", "sublinearity"};
    for (const auto& row : bern::dloc_run(opt.alpha, grid))
      table.rows.push_back({fmt(row.n), fmt(row.log_error),
                            fmt(row.paper_lower_bound),
                            fmt(row.sublinearity)});
    return 0;
  }
  throw std::runtime_error("unknown experiment: " + opt.experiment_name);
}

std::vector<std::string> args_from_config(const std::string& path) {
  const nlohmann::json doc = nlohmann::json::parse(read_file(path));
  std::vector<std::string> args;
  args.push_back(doc.at("command").get<std::string>());
  if (doc.contains("experiment"))
    args.push_back(doc.at("experiment").get<std::string>());
  if (doc.contains("args")) {
    for (const auto& [key, value] : doc.at("args").items()) {
      args.push_back("--" + key);
      if (value.is_string())
        args.push_back(value.get<std::string>());
      else
        args.push_back(value.dump());
    }
  }
  return args;
}

int dispatch(std::vector<std::string> args);

int run_cli(const std::string& command, const Options& opt,
            const std::vector<std::string>& echo) {
  Table table;
  table.meta = config_echo(echo);
  table.meta.push_back("seed: " + std::to_string(opt.seed));
  int status = 0;
  if (command == "eval")
    status = run_eval(opt, table);
  else if (command == "bounds")
    status = run_bounds(opt, table);
  else if (command == "verify")
    status = run_verify(opt, table);
  else if (command == "decay")
    status = run_decay(opt, table);
  else
    status = run_experiment(opt, table);

  if (opt.output_path.empty()) {
    emit(table, opt.format, std::cout);
  } else {
    std::ofstream out(opt.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output: " + opt.output_path);
    emit(table, opt.format, out);
  }
  return status;
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Bernstein / Bernstein-Kantorovich operator toolbox"};
  app.require_subcommand(0, 1);

  Options opt;
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; replaces all other arguments");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", opt.output_path,
                    "Output path (default: standard output)");
    sub->add_option("--seed", opt.seed, "Seed recorded in the output header");
  };

  CLI::App* eval = app.add_subcommand("eval", "Evaluate B_n f or B_{n,k} f");
  eval->add_option("--f", opt.function_arg, "Function spec (inline or file)")
      ->required();
  eval->add_option("--n", opt.n_list, "n or comma-separated n grid")->required();
  eval->add_option("--x", opt.x, "Evaluation point")->required();
  eval->add_option("--k", opt.k, "Kantorovich k (0 = plain Bernstein)");
  eval->add_option("--w", opt.w_kind, "Perturbation law: irwin_hall|point_mass");
  eval->add_option("--w-point", opt.w_point, "Point-mass location");
  add_common(eval);

  CLI::App* bounds =
      app.add_subcommand("bounds", "Exact vs Chernoff vs Ferrante tails");
  bounds->add_option("--n", opt.n_list, "n or comma-separated n grid")
      ->required();
  bounds->add_option("--x", opt.x, "Success probability")->required();
  bounds->add_option("--threshold", opt.threshold, "Tail threshold (fraction)")
      ->required();
  bounds->add_option("--side", opt.side, "upper or lower")
      ->check(CLI::IsMember({"upper", "lower"}));
  add_common(bounds);

  CLI::App* verify =
      app.add_subcommand("verify", "Check the locally-constant bound");
  verify->add_option("--f", opt.function_arg, "Function spec")->required();
  verify->add_option("--n", opt.n_list, "n or comma-separated n grid")
      ->required();
  verify->add_option("--x", opt.x, "Evaluation point")->required();
  verify->add_option("--a", opt.a, "Left end of the constant interval")
      ->required();
  verify->add_option("--b", opt.b, "Right end of the constant interval")
      ->required();
  verify->add_option("--c", opt.c, "Constant value");
  verify->add_option("--k", opt.k, "Kantorovich k (0 = plain Bernstein)");
  verify->add_option("--w", opt.w_kind, "Perturbation law: irwin_hall|point_mass");
  verify->add_option("--w-point", opt.w_point, "Point-mass location");
  add_common(verify);

  CLI::App* decay =
      app.add_subcommand("decay", "Fit the empirical decay exponent");
  decay->add_option("--f", opt.function_arg, "Function spec")->required();
  decay->add_option("--n", opt.n_list, "Comma-separated increasing n grid")
      ->required();
  decay->add_option("--x", opt.x, "Evaluation point")->required();
  decay->add_option("--a", opt.a, "Left end of the constant interval")
      ->required();
  decay->add_option("--b", opt.b, "Right end of the constant interval")
      ->required();
  decay->add_option("--c", opt.c, "Constant value");
  add_common(decay);

  CLI::App* experiment = app.add_subcommand(
      "experiment", "Named experiments: sharpness|boundary|herzog_hill|dloc");
  experiment
      ->add_option("name", opt.experiment_name,
                   "sharpness, boundary, herzog_hill or dloc")
      ->required();
  experiment->add_option("--n", opt.n_list, "Comma-separated n grid")
      ->required();
  experiment->add_option("--x", opt.x, "x for sharpness");
  experiment->add_option("--k", opt.sharp_k, "k for sharpness (b = k/m)");
  experiment->add_option("--m", opt.sharp_m, "m for sharpness (b = k/m)");
  experiment->add_option("--s", opt.s, "Exponent s for boundary");
  experiment->add_option("--b", opt.b, "Jump location for herzog_hill");
  experiment->add_option("--alpha", opt.alpha, "Cusp exponent for dloc");
  add_common(experiment);

  try {
    // CLI11 consumes argv-style (reversed) token lists.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 2;
  }

  if (!config_path.empty()) return dispatch(args_from_config(config_path));
  if (app.get_subcommands().empty()) {
    std::cerr << "error: a subcommand or --config is required\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return run_cli(command, opt, args);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
