// cipher: command line front end for the CIPHER pipeline.
//
//   cipher run --config cfg.yaml --project proj
//   cipher cluster --project proj          (reuses proj/config.yaml)
//   cipher serve --project proj --port 8080
//
// Failures exit nonzero and print one JSON line to stderr:
//   {"error":"missing_artifact","message":"...","stage":"index"}

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cipher/error.hpp"
#include "cipher/pipeline.hpp"
#include "cipher/service.hpp"
#include "cipher/stores.hpp"
#include "cipher/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kConfig = 3,
  kMissingArtifact = 4,
  kBadInput = 5,
};

int report(std::string_view code, const std::string& message, int status,
           json extra = json::object()) {
  extra["error"] = code;
  extra["message"] = message;
  std::cerr << extra.dump() << '\n';
  return status;
}

cipher::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

struct Common {
  std::optional<std::string> config;
  std::string project;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c, bool need_config_flag = true) {
  if (need_config_flag) {
    cmd->add_option("--config", c.config,
                    "Pipeline config (YAML); defaults to the project's config.yaml snapshot");
  }
  cmd->add_option("--project", c.project, "Project directory")->required();
  cmd->add_flag("-v,--verbose", c.verbose, "Print stage progress to stderr");
}

std::optional<fs::path> as_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return fs::path(*s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CIPHER: symbolic compression, clustering and expert labeling of time series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cipher 0.1.0");

  Common common;
  std::optional<cipher::Stage> stage;
  bool run_all = false;

  const char* stage_names[] = {"ingest", "window", "preprocess", "index",
                               "cluster", "summarize", "export"};
  const char* stage_help[] = {
      "Parse dataset tables into the series store",
      "Cut the clustering channel into fixed-length windows",
      "Gap-fill, detrend, smooth and z-normalize each window",
      "Build the iSAX index from window PAA vectors",
      "Run HDBSCAN (plus the relaxed noise pass) on iSAX words",
      "Write per-cluster mean and 5-95% envelopes",
      "Propagate journaled labels and write the event catalog",
  };
  for (std::size_t i = 0; i < std::size(stage_names); ++i) {
    auto* cmd = app.add_subcommand(stage_names[i], stage_help[i]);
    add_common(cmd, common);
    cmd->callback([&stage, name = stage_names[i]] { stage = cipher::parse_stage(name); });
  }
  auto* run = app.add_subcommand("run", "ingest -> window -> preprocess -> index -> cluster -> summarize");
  add_common(run, common);
  run->callback([&run_all] { run_all = true; });

  cipher::ServeOptions serve_opts;
  std::optional<std::string> ui_dir;
  auto* serve = app.add_subcommand("serve", "Serve the labeling API (and UI assets)");
  add_common(serve, common, false);
  serve->add_option("--port", serve_opts.port, "TCP port (0 picks a free one)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--host", serve_opts.host, "Bind address");
  serve->add_option("--ui", ui_dir, "Directory of built UI assets served at /");

  cipher::SyntheticParams synth_params;
  std::string synth_out;
  std::optional<std::string> synth_truth;
  auto* synth = app.add_subcommand("synth", "Write a synthetic two-family OMNI-style fixture");
  synth->add_option("--out", synth_out, "Output table")->required();
  synth->add_option("--truth", synth_truth, "Optional CSV of slot,family ground truth");
  synth->add_option("--events-per-family", synth_params.events_per_family)
      ->check(CLI::PositiveNumber);
  synth->add_option("--window-samples", synth_params.window_samples)
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_params.seed);
  synth->add_option("--fill-fraction", synth_params.fill_fraction)->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), kUsage);
  } catch (const cipher::ConfigError& e) {
    return report("config", e.what(), kConfig);
  }

  try {
    if (synth->parsed()) {
      const auto data = cipher::generate_synthetic(synth_params);
      std::ofstream out(synth_out);
      if (!out) return report("io", "cannot write " + synth_out, kFailure);
      cipher::write_omni_table(out, data);
      if (synth_truth) {
        std::ofstream truth(*synth_truth);
        truth << "slot,family\n";
        for (std::size_t k = 0; k < data.truth.size(); ++k) {
          truth << k << ',' << (data.truth[k] == cipher::EventFamily::kCmeLike ? "CME" : "SIR")
                << '\n';
        }
      }
      return kOk;
    }

    const fs::path project(common.project);
    if (serve->parsed()) {
      if (ui_dir) serve_opts.static_dir = fs::path(*ui_dir);
      cipher::Server server(project, serve_opts);
      const int port = server.bind();
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << project.string() << " on http://" << serve_opts.host << ':'
                << port << '\n';
      server.listen();
      g_server = nullptr;
      return kOk;
    }

    const auto config = cipher::resolve_config(as_path(common.config), project);
    cipher::StageOptions options;
    if (common.verbose) options.log = &std::cerr;
    if (run_all) {
      cipher::run_pipeline(config, project, options);
    } else {
      cipher::run_stage(*stage, config, project, options);
    }
    return kOk;
  } catch (const cipher::MissingArtifactError& e) {
    return report("missing_artifact", e.what(), kMissingArtifact,
                  {{"stage", e.stage()}, {"artifact", e.artifact()}});
  } catch (const cipher::ConfigError& e) {
    return report("config", e.what(), kConfig);
  } catch (const cipher::ParseError& e) {
    return report("parse", e.what(), kBadInput, {{"line", e.line()}});
  } catch (const cipher::StructuralError& e) {
    return report("structure", e.what(), kBadInput);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kFailure);
  }
}
