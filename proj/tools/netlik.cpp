// Copyright 2026 The netlik Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// netlik: likelihood, sweep, fit, grow and stats over growth-trace files.
//
// Exit codes: 0 success, 1 usage or input error, 2 zero-probability choices
// under strict evaluation.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netlik/netlik.hpp"

namespace {

using namespace netlik;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GrowthTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trace '" + path + "'");
  try {
    return parse_trace(in);
  } catch (const TraceError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Runs `body` with either the named file or stdout ("-" or empty).
void with_output(const std::string& path,
                 const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  body(out);
  if (!out) throw UsageError("error writing '" + path + "'");
}

InnerModel checked_model(const std::string& spec, const std::string& flag,
                         bool allow_invalid = false) {
  InnerModel m;
  try {
    m = parse_model(spec);
  } catch (const ModelError& e) {
    throw UsageError(flag + ": " + e.what());
  }
  if (!allow_invalid) {
    const auto report = validate(m);
    if (!report.valid) {
      throw UsageError(flag + " '" + spec + "' is not a valid model: " +
                       report.message());
    }
  }
  return m;
}

struct CommonOptions {
  std::string choice_set = "simple";
  bool seed_selections = false;

  void attach(CLI::App* app) {
    app->add_option("--choice-set", choice_set,
                    "normalise over 'simple' (legal) or 'all' candidates")
        ->check(CLI::IsMember({"simple", "all"}));
    app->add_flag("--seed-selections", seed_selections,
                  "count seed-edge endpoints as past selections");
  }

  ReplayOptions replay() const {
    ReplayOptions r;
    r.choice_set =
        choice_set == "all" ? ChoiceSetMode::kAll : ChoiceSetMode::kSimple;
    r.seed_selections = seed_selections;
    return r;
  }
};

// ---------------------------------------------------------------------------

struct LikelihoodCmd {
  std::string trace;
  std::string node_model;
  std::string newest_model;
  std::string edge_model;
  double epsilon = 0.0;
  bool allow_invalid = false;
  std::string csv;
  CommonOptions common;

  void attach(CLI::App* app) {
    app->add_option("--trace", trace, "trace file")->required();
    app->add_option("--node-model", node_model,
                    "model for new-node attachments (and the default for the others)")
        ->required();
    app->add_option("--newest-model", newest_model,
                    "model for newest-node attachments");
    app->add_option("--edge-model", edge_model, "model for inner edges");
    app->add_option("--epsilon", epsilon,
                    "mix (1-E)*model + E*null before evaluating")
        ->check(CLI::Range(0.0, 0.999999));
    app->add_flag("--allow-invalid", allow_invalid,
                  "evaluate models whose weights are out of range");
    app->add_option("--csv", csv, "also write the report as CSV");
    common.attach(app);
  }

  int run() const {
    const InnerModel node = checked_model(node_model, "--node-model", allow_invalid);
    ModelSet models{
        node,
        newest_model.empty()
            ? node
            : checked_model(newest_model, "--newest-model", allow_invalid),
        edge_model.empty()
            ? node
            : checked_model(edge_model, "--edge-model", allow_invalid)};
    const GrowthTrace t = load_trace(trace);
    LikelihoodOptions opt;
    opt.replay = common.replay();
    opt.epsilon = epsilon;
    opt.allow_invalid = allow_invalid;
    const LikelihoodReport r = trace_log_likelihood(models, t, opt);

    auto f = detail::format_double;
    std::cout << "log_likelihood " << f(r.log_likelihood) << '\n'
              << "choices " << r.choices << '\n'
              << "deviance " << f(r.deviance) << '\n'
              << "null_log_likelihood " << f(r.null_log_likelihood) << '\n'
              << "null_deviance " << f(r.null_deviance) << '\n'
              << "c0 " << f(r.c0) << '\n'
              << "zero_probability_choices " << r.zero_probability_choices
              << '\n';
    if (r.fallback_choices) {
      std::cerr << "note: " << r.fallback_choices
                << " choices had a component with no support on its choice "
                   "set; it was treated as uniform there\n";
    }
    if (!csv.empty()) {
      with_output(csv, [&](std::ostream& out) {
        out << "log_likelihood,t,deviance,null_log_likelihood,null_deviance,"
               "c0,zero_probability_choices\n"
            << f(r.log_likelihood) << ',' << r.choices << ',' << f(r.deviance)
            << ',' << f(r.null_log_likelihood) << ',' << f(r.null_deviance)
            << ',' << f(r.c0) << ',' << r.zero_probability_choices << '\n';
      });
    }
    return r.zero_probability_choices ? kExitDegenerate : kExitOk;
  }
};

struct SweepCmd {
  std::string trace;
  std::string node_model;
  std::string newest_model;
  std::string edge_model;
  std::vector<std::string> grid;
  std::string out;
  double epsilon = 0.0;
  unsigned jobs = 1;
  CommonOptions common;

  void attach(CLI::App* app) {
    app->add_option("--trace", trace, "trace file")->required();
    app->add_option("--node-model", node_model,
                    "model template, e.g. 'rest*pfp($d),$bt*triangle'")
        ->required();
    app->add_option("--newest-model", newest_model, "template for newest-node attachments");
    app->add_option("--edge-model", edge_model, "template for inner edges");
    app->add_option("--grid", grid, "axis 'name=start:stop:step' or 'name=v1,v2'")
        ->required();
    app->add_option("--out", out, "CSV output (default stdout)");
    app->add_option("--epsilon", epsilon, "null smoothing weight")
        ->check(CLI::Range(0.0, 0.999999));
    app->add_option("--jobs", jobs, "parallel replays")->check(CLI::PositiveNumber);
    common.attach(app);
  }

  int run() const {
    SweepTemplates templates{ModelTemplate::parse(node_model), {}, {}};
    if (!newest_model.empty()) templates.newest = ModelTemplate::parse(newest_model);
    if (!edge_model.empty()) templates.edge = ModelTemplate::parse(edge_model);
    std::vector<GridAxis> axes;
    for (const auto& g : grid) axes.push_back(parse_axis(g));
    const GrowthTrace t = load_trace(trace);
    LikelihoodOptions opt;
    opt.replay = common.replay();
    opt.epsilon = epsilon;
    const SweepResult result = sweep(t, templates, axes, opt, jobs);
    with_output(out, [&](std::ostream& o) { write_sweep_csv(result, o); });
    const auto& best = result.rows[result.argmax];
    std::ostream& info = (out.empty() || out == "-") ? std::cerr : std::cout;
    info << "points " << result.rows.size() << "\nargmax row "
         << result.argmax + 1;
    for (std::size_t a = 0; a < result.names.size(); ++a) {
      info << ' ' << result.names[a] << '='
           << detail::format_double(best.point[a]);
    }
    info << " c0=" << detail::format_double(best.report.c0) << '\n';
    return kExitOk;
  }
};

struct FitCmd {
  std::string trace;
  std::string components;
  std::string negatives = "10";
  std::uint64_t rng = 0;
  std::string scope = "node";
  std::string design_out;
  std::string csv;
  CommonOptions common;

  void attach(CLI::App* app) {
    app->add_option("--trace", trace, "trace file")->required();
    app->add_option("--components", components,
                    "comma-separated components, e.g. 'pfp(0.05),triangle'")
        ->required();
    app->add_option("--negatives", negatives,
                    "non-chosen candidates sampled per choice, or 'all'");
    app->add_option("--rng", rng, "sampling seed");
    app->add_option("--scope", scope, "'node' attachments or 'edge' inner edges")
        ->check(CLI::IsMember({"node", "edge"}));
    app->add_option("--design-out", design_out, "dump the design matrix as CSV");
    app->add_option("--csv", csv, "write estimates as CSV");
    common.attach(app);
  }

  int run() const {
    std::vector<Component> comps;
    try {
      for (const auto& t : parse_model(components).terms) {
        if (t.weight != 1.0) throw UsageError("--components takes no weights");
        comps.push_back(t.component);
      }
    } catch (const ModelError& e) {
      throw UsageError(std::string("--components: ") + e.what());
    }
    SamplingSpec sampling;
    sampling.rng_seed = rng;
    if (negatives == "all") {
      sampling.negatives.reset();
    } else {
      const auto v = detail::parse_double(negatives);
      if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
        throw UsageError("--negatives must be a positive integer or 'all'");
      }
      sampling.negatives = static_cast<std::size_t>(*v);
    }
    DesignOptions opt;
    opt.scope = scope == "edge" ? DesignScope::kInnerEdge : DesignScope::kNodeAttachment;
    opt.replay = common.replay();
    const GrowthTrace t = load_trace(trace);
    const Design design = build_design(t, comps, sampling, opt);
    if (!design_out.empty()) {
      with_output(design_out, [&](std::ostream& o) { write_design_csv(design, o); });
    }
    const FitReport report = fit(design);
    write_fit_table(report, std::cout);
    if (!csv.empty()) {
      with_output(csv, [&](std::ostream& o) { write_fit_csv(report, o); });
    }
    return kExitOk;
  }
};

struct GrowCmd {
  std::string preset;
  std::string node_model;
  std::string edge_model;
  std::string driver;
  std::string replay_trace;
  std::string seed_trace;
  std::size_t seed_clique = 3;
  std::size_t edges = 0;
  std::uint64_t rng = 0;
  std::string out;
  bool seed_selections = false;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "paper-theta1 or paper-theta2");
    app->add_option("--node-model", node_model, "model for node attachments");
    app->add_option("--edge-model", edge_model, "model for inner edges");
    app->add_option("--driver", driver,
                    "attach:M, attach:MIN-MAX, mixed:NEW,NEWEST,INNER or replay");
    app->add_option("--replay-trace", replay_trace,
                    "trace whose operation sequence (and seed) the replay driver follows");
    app->add_option("--seed-trace", seed_trace, "seed graph from a trace's SEED section");
    app->add_option("--seed-clique", seed_clique, "seed clique size (default 3)")
        ->check(CLI::Range(2, 1000));
    app->add_option("--edges", edges, "events to generate");
    app->add_option("--rng", rng, "random seed");
    app->add_option("--out", out, "trace output (default stdout)");
    app->add_flag("--seed-selections", seed_selections,
                  "count seed-edge endpoints as past selections");
  }

  static OuterDriver parse_driver(const std::string& spec) {
    auto number = [&](std::string_view s) {
      const auto v = detail::parse_double(s);
      if (!v) throw UsageError("bad number in --driver '" + spec + "'");
      return *v;
    };
    if (spec.rfind("attach:", 0) == 0) {
      const std::string body = spec.substr(7);
      const auto dash = body.find('-');
      AttachDriver d;
      d.min_edges = static_cast<std::uint32_t>(number(body.substr(0, dash)));
      d.max_edges = dash == std::string::npos
                        ? d.min_edges
                        : static_cast<std::uint32_t>(number(body.substr(dash + 1)));
      return d;
    }
    if (spec.rfind("mixed:", 0) == 0) {
      const auto parts = detail::split_terms(std::string_view(spec).substr(6));
      if (parts.size() != 3) throw UsageError("mixed driver needs three weights");
      return MixedDriver{number(parts[0]), number(parts[1]), number(parts[2])};
    }
    throw UsageError("unknown --driver '" + spec + "'");
  }

  int run() const {
    GrowConfig config;
    config.rng_seed = rng;
    config.seed_selections = seed_selections;
    if (!preset.empty()) {
      const auto p = find_preset(preset);
      if (!p) throw UsageError("unknown preset '" + preset + "'");
      config.node_model = p->node_model;
      config.edge_model = p->edge_model;
      config.driver = p->driver;
    }
    if (!node_model.empty()) {
      config.node_model = checked_model(node_model, "--node-model");
      if (edge_model.empty()) config.edge_model = config.node_model;
    }
    if (!edge_model.empty()) config.edge_model = checked_model(edge_model, "--edge-model");
    if (config.node_model.terms.empty()) {
      throw UsageError("give --preset or --node-model");
    }
    std::optional<GrowthTrace> replay_source;
    if (driver == "replay") {
      if (replay_trace.empty()) throw UsageError("replay driver needs --replay-trace");
      replay_source = load_trace(replay_trace);
      config.driver = ReplayDriver::of(*replay_source);
    } else if (!driver.empty()) {
      config.driver = parse_driver(driver);
    } else if (preset.empty()) {
      throw UsageError("give --driver when not using a preset");
    }
    if (!seed_trace.empty()) {
      GrowthTrace s = load_trace(seed_trace);
      s.events.clear();
      config.seed = std::move(s);
    } else if (replay_source) {
      GrowthTrace s = *replay_source;
      s.events.clear();
      config.seed = std::move(s);
    } else {
      config.seed = clique_seed(seed_clique);
    }
    config.target_edges = edges;
    if (edges == 0 && !replay_source) throw UsageError("--edges is required");

    const GrowthTrace t = grow(config);
    std::vector<std::string> header = {
        "netlik grow", "rng " + std::to_string(rng),
        "node-model " + to_string(config.node_model),
        "edge-model " + to_string(config.edge_model)};
    with_output(out, [&](std::ostream& o) { write_trace(t, o, header); });
    (out.empty() || out == "-" ? std::cerr : std::cout) << "rng " << rng << '\n';
    return kExitOk;
  }
};

struct StatsCmd {
  std::string trace;
  std::size_t every = 1000;
  std::string clustering = "transitivity";
  std::string out;
  CommonOptions common;

  void attach(CLI::App* app) {
    app->add_option("--trace", trace, "trace file")->required();
    app->add_option("--every", every, "sample interval in events")
        ->check(CLI::PositiveNumber);
    app->add_option("--clustering", clustering, "transitivity or local-mean")
        ->check(CLI::IsMember({"transitivity", "local-mean"}));
    app->add_option("--out", out, "CSV output (default stdout)");
    common.attach(app);
  }

  int run() const {
    const GrowthTrace t = load_trace(trace);
    const auto mode = clustering == "local-mean" ? ClusteringMode::kLocalMean
                                                 : ClusteringMode::kTransitivity;
    const auto points = trajectory(t, every, mode, common.replay());
    with_output(out, [&](std::ostream& o) { write_trajectory_csv(points, o); });
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood, fitting and growth of evolving-network models"};
  app.require_subcommand(1);

  LikelihoodCmd likelihood;
  SweepCmd sweep_cmd;
  FitCmd fit_cmd;
  GrowCmd grow_cmd;
  StatsCmd stats;
  auto* c_lik = app.add_subcommand("likelihood", "log-likelihood and c0 of a model on a trace");
  auto* c_sweep = app.add_subcommand("sweep", "likelihood over a parameter grid");
  auto* c_fit = app.add_subcommand("fit", "regression fit of component weights");
  auto* c_grow = app.add_subcommand("grow", "grow a synthetic trace");
  auto* c_stats = app.add_subcommand("stats", "statistic trajectory of a trace");
  likelihood.attach(c_lik);
  sweep_cmd.attach(c_sweep);
  fit_cmd.attach(c_fit);
  grow_cmd.attach(c_grow);
  stats.attach(c_stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_lik) return likelihood.run();
    if (*c_sweep) return sweep_cmd.run();
    if (*c_fit) return fit_cmd.run();
    if (*c_grow) return grow_cmd.run();
    if (*c_stats) return stats.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
