// Copyright 2026 The PromptGauntlet Authors.
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

#include "cli.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gauntlet/chat_client.hpp"
#include "gauntlet/codec.hpp"
#include "gauntlet/error.hpp"
#include "gauntlet/generation.hpp"
#include "gauntlet/interaction.hpp"
#include "gauntlet/judge_service.hpp"
#include "gauntlet/replay.hpp"
#include "gauntlet/report.hpp"
#include "gauntlet/scheduler.hpp"
#include "gauntlet/simulator.hpp"
#include "gauntlet/tournament.hpp"

namespace gauntlet::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kConfigFile = "config.json";
constexpr const char* kLogFile = "events.jsonl";
constexpr const char* kLockFile = ".lock";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out.flush()) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

// Exclusive advisory lock on <dir>/.lock, held for the object's lifetime.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) {
    const fs::path path = dir / kLockFile;
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::kLocked,
                  "another promptgauntlet process holds " + path.string());
    }
  }
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

struct DirectoryConfig {
  std::string tournament_id;
  TournamentConfig config;
};

DirectoryConfig load_config(const fs::path& dir) {
  const fs::path path = dir / kConfigFile;
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kConfig, path.string() + " not found; run `init` first");
  }
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  DirectoryConfig out;
  out.tournament_id = j.value("tournament_id", std::string());
  if (out.tournament_id.empty()) out.tournament_id = dir.filename().string();
  out.config = tournament_config_from_json(j);
  return out;
}

// Brings the log in line with config.json.
void sync_config(Tournament& tournament, const fs::path& dir, std::ostream& err) {
  const DirectoryConfig cfg = load_config(dir);
  for (const auto& w : tournament.log_warnings()) err << "warning: " << w << "\n";
  tournament.ensure_config(cfg.tournament_id, cfg.config);
}

void print_error(std::ostream& err, std::string_view code, std::string_view message) {
  err << json{{"error", std::string(code)}, {"message", std::string(message)}}.dump() << "\n";
}

std::vector<fs::path> expand_template_paths(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tmpl") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

// ---- subcommands -----------------------------------------------------------

struct InitOptions {
  std::string dir = ".";
  std::string name;
  std::vector<std::string> judges;
  int target_decisions = 30;
  double epsilon = 0.2;
  int coverage_floor = 0;
  std::uint64_t seed = 0;
};

int cmd_init(const InitOptions& o, std::ostream& out) {
  const fs::path dir(o.dir);
  fs::create_directories(dir);
  DirectoryLock lock(dir);

  TournamentConfig config;
  config.name = o.name.empty() ? fs::absolute(dir).filename().string() : o.name;
  config.target_decisions = o.target_decisions;
  config.policy.epsilon = o.epsilon;
  config.policy.coverage_floor = o.coverage_floor;
  config.policy.rng_seed = o.seed;
  for (const auto& spec : o.judges) {
    const auto colon = spec.find(':');
    JudgeConfig judge;
    judge.judge_id = spec.substr(0, colon);
    judge.display_name = colon == std::string::npos ? judge.judge_id : spec.substr(colon + 1);
    config.judges.push_back(std::move(judge));
  }
  config.validate();

  json j = encode(config);
  j["tournament_id"] = config.name;
  const std::string text = j.dump(2) + "\n";
  const fs::path config_path = dir / kConfigFile;
  if (fs::exists(config_path)) {
    if (read_file(config_path) == text) {
      out << "already initialized: " << dir.string() << "\n";
      return kExitOk;
    }
    throw Error(ErrorCode::kConfig,
                config_path.string() + " already exists with different settings");
  }
  write_file(config_path, text);
  if (!fs::exists(dir / kLogFile)) write_file(dir / kLogFile, "");
  out << "initialized " << dir.string() << " (" << config.judges.size() << " judges)\n";
  return kExitOk;
}

int cmd_templates_add(const std::string& dir, const std::vector<std::string>& files,
                      std::ostream& out, std::ostream& err) {
  DirectoryLock lock(dir);
  load_config(dir);
  Tournament tournament = Tournament::open(fs::path(dir) / kLogFile);
  sync_config(tournament, dir, err);
  std::size_t registered = 0, unchanged = 0, warnings = 0;
  for (const auto& path : expand_template_paths(files)) {
    const TemplateRegistration reg = tournament.register_template(read_file(path));
    for (const auto& w : reg.warnings) {
      out << "lint: " << reg.template_id << ": message " << w.message_index << ": {{" << w.slot
          << "}} " << w.reason << "\n";
    }
    warnings += reg.warnings.size();
    if (reg.newly_registered) {
      ++registered;
      out << "registered " << reg.template_id << "\n";
    } else {
      ++unchanged;
      out << "unchanged " << reg.template_id << "\n";
    }
  }
  out << registered << " registered, " << unchanged << " unchanged, " << warnings
      << " lint warnings\n";
  return kExitOk;
}

int cmd_ingest(const std::string& dir, const std::string& file, std::ostream& out,
               std::ostream& err) {
  DirectoryLock lock(dir);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + file);
  const std::vector<InteractionRecord> records = ingest_interactions(in);
  load_config(dir);
  Tournament tournament = Tournament::open(fs::path(dir) / kLogFile);
  sync_config(tournament, dir, err);
  const IngestResult result = tournament.ingest(records);
  out << result.added << " ingested, " << result.unchanged << " unchanged\n";
  return kExitOk;
}

struct GenerateOptions {
  std::string dir = ".";
  std::string endpoint;
  std::string model;
  double temperature = 0.7;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;
  int parallelism = 4;
  int retries = 3;
  int backoff_ms = 500;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  generation::GenerationConfig config;
  config.endpoint_url = o.endpoint;
  config.model_name = o.model;
  config.temperature = o.temperature;
  config.max_tokens = o.max_tokens;
  config.seed = o.seed;
  config.parallelism = o.parallelism;
  config.retry.max_attempts = o.retries;
  config.retry.initial_backoff = std::chrono::milliseconds(o.backoff_ms);
  config.validate();

  DirectoryLock lock(o.dir);
  load_config(o.dir);
  Tournament tournament = Tournament::open(fs::path(o.dir) / kLogFile);
  sync_config(tournament, o.dir, err);
  chat::HttpTransportOptions http;
  http.endpoint_url = o.endpoint;
  http.api_key = chat::api_key_from_env();
  chat::ChatClient client(chat::make_http_transport(http), config.retry);
  const generation::GenerationSummary summary = tournament.generate(config, client);
  out << summary.total_pairs << " pairs: " << summary.generated << " generated, "
      << summary.cached << " cached, " << summary.failed << " failed\n";
  for (const auto& f : summary.failures) {
    out << "failed " << f.template_id << " x " << f.interaction_id << " after " << f.attempts
        << " attempt(s): " << f.error << "\n";
  }
  if (summary.failed > 0) {
    throw Error(ErrorCode::kGenerationFailed,
                std::to_string(summary.failed) + " generation request(s) failed");
  }
  return kExitOk;
}

int cmd_serve(const std::string& dir, const std::string& bind,
              const std::optional<std::string>& ui_dir, std::ostream& out, std::ostream& err) {
  DirectoryLock lock(dir);
  load_config(dir);
  Tournament tournament = Tournament::open(fs::path(dir) / kLogFile);
  sync_config(tournament, dir, err);
  service::ServiceOptions options = service::parse_bind(bind);
  if (ui_dir) options.ui_dir = fs::path(*ui_dir);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::JudgeService svc(tournament, options);
  const int port = svc.start();
  out << "serving on http://" << options.host << ":" << port << "\n" << std::flush;
  int received = 0;
  sigwait(&signals, &received);
  svc.stop();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  out << "stopped\n";
  return kExitOk;
}

struct SimulateOptions {
  std::string config;
  std::string json_out;
  std::string csv_out;
  std::string emit_log;
  int replication = 0;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  json j;
  try {
    j = json::parse(read_file(o.config));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, o.config + ": " + e.what());
  }
  const sim::SimulationConfig config = sim::simulation_config_from_json(j);
  if (!o.emit_log.empty()) {
    std::vector<Event> events;
    sim::run_replication(config, o.replication, &events);
    std::string text;
    for (const auto& e : events) text += serialize_event(e) + "\n";
    write_file(o.emit_log, text);
  }
  const sim::SimulationReport report = sim::simulate(config);
  const std::string report_text = sim::report_json(report).dump(2) + "\n";
  if (!o.json_out.empty()) {
    write_file(o.json_out, report_text);
  } else {
    out << report_text;
  }
  if (!o.csv_out.empty()) write_file(o.csv_out, sim::report_csv(report));
  return kExitOk;
}

int cmd_report(const std::string& dir, const std::string& format_text,
               const std::string& out_dir, std::ostream& out) {
  const report::ReportFormat format = report::parse_report_format(format_text);
  const EventLog log = EventLog::open(fs::path(dir) / kLogFile);
  const TournamentState state = replay(log.events());
  const fs::path target = out_dir.empty() ? fs::path(dir) / "reports" : fs::path(out_dir);
  fs::create_directories(target);
  for (const auto& file : report::export_report(state, format)) {
    write_file(target / file.filename, file.content);
    out << "wrote " << (target / file.filename).string() << "\n";
  }
  return kExitOk;
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

int cmd_verify_replay(const std::string& dir, const std::string& log_path, std::ostream& out,
                      std::ostream& err) {
  const fs::path path = log_path.empty() ? fs::path(dir) / kLogFile : fs::path(log_path);
  const EventLog log = EventLog::open(path);
  const TournamentState first = replay(log.events());
  const TournamentState second = replay(log.events());
  const auto s1 = scheduler::standings(first);
  const auto s2 = scheduler::standings(second);
  const auto m1 = report::win_matrix(first);
  const auto m2 = report::win_matrix(second);

  bool same = s1.size() == s2.size() && m1.size() == m2.size();
  for (std::size_t i = 0; same && i < s1.size(); ++i) {
    same = s1[i].template_id == s2[i].template_id && s1[i].games == s2[i].games &&
           bitwise_equal(s1[i].state.rating, s2[i].state.rating) &&
           bitwise_equal(s1[i].state.rd, s2[i].state.rd) &&
           bitwise_equal(s1[i].state.sigma, s2[i].state.sigma);
  }
  for (std::size_t i = 0; same && i < m1.size(); ++i) {
    same = m1[i].template_a == m2[i].template_a && m1[i].template_b == m2[i].template_b &&
           m1[i].trials == m2[i].trials &&
           bitwise_equal(m1[i].prob_a_beats_b, m2[i].prob_a_beats_b);
  }
  same = same && first.decision_seq == second.decision_seq && first.skips == second.skips;
  if (!same) {
    print_error(err, "replay_mismatch", "two replays of " + path.string() + " disagree");
    return kExitOperational;
  }
  out << "replay ok: " << log.events().size() << " events, " << first.decision_seq
      << " decisions (" << first.skips << " skips), " << s1.size() << " templates\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt tournament engine: generate, judge, rate, report."};
  app.name(args.empty() ? "promptgauntlet" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  InitOptions init;
  auto* init_cmd = app.add_subcommand("init", "Create a tournament directory");
  init_cmd->add_option("--dir", init.dir, "Tournament directory")->required();
  init_cmd->add_option("--name", init.name, "Tournament name");
  init_cmd->add_option("--judge", init.judges, "Judge as id or id:Display Name (repeatable)");
  init_cmd->add_option("--target-decisions", init.target_decisions, "Decisions asked per judge");
  init_cmd->add_option("--epsilon", init.epsilon, "Exploration probability");
  init_cmd->add_option("--coverage-floor", init.coverage_floor, "Trials per pair before exploiting");
  init_cmd->add_option("--seed", init.seed, "Scheduler RNG seed");

  std::string dir = ".";
  std::vector<std::string> template_files;
  auto* templates_cmd = app.add_subcommand("templates", "Manage prompt templates");
  templates_cmd->require_subcommand(1);
  auto* templates_add = templates_cmd->add_subcommand("add", "Parse, lint, and register templates");
  templates_add->add_option("--dir", dir, "Tournament directory");
  templates_add->add_option("--file", template_files, "Template file or directory of *.tmpl")
      ->required();

  std::string ingest_file;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load interaction records (JSON lines)");
  ingest_cmd->add_option("--dir", dir, "Tournament directory");
  ingest_cmd->add_option("--file", ingest_file, "Interactions file")->required();

  GenerateOptions gen;
  std::int64_t gen_seed = 0;
  auto* generate_cmd = app.add_subcommand("generate", "Generate candidates via chat completions");
  generate_cmd->add_option("--dir", gen.dir, "Tournament directory");
  generate_cmd->add_option("--endpoint", gen.endpoint, "Base URL, e.g. http://host:8000/v1")
      ->required();
  generate_cmd->add_option("--model", gen.model, "Model name")->required();
  generate_cmd->add_option("--temperature", gen.temperature, "Sampling temperature");
  generate_cmd->add_option("--max-tokens", gen.max_tokens, "Completion token limit");
  auto* seed_opt = generate_cmd->add_option("--seed", gen_seed, "Sampling seed");
  generate_cmd->add_option("--parallelism", gen.parallelism, "Concurrent requests");
  generate_cmd->add_option("--retries", gen.retries, "Attempts per request");
  generate_cmd->add_option("--backoff-ms", gen.backoff_ms, "Initial retry backoff");

  std::string bind = "127.0.0.1:7878";
  std::optional<std::string> ui_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the judging HTTP service");
  serve_cmd->add_option("--dir", dir, "Tournament directory");
  serve_cmd->add_option("--bind", bind, "Listen address host:port");
  serve_cmd->add_option("--ui-dir", ui_dir, "Directory of built UI assets served at /");

  SimulateOptions simo;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run synthetic-judge tournaments");
  simulate_cmd->add_option("--config", simo.config, "Simulation config (JSON)")->required();
  simulate_cmd->add_option("--json", simo.json_out, "Write the JSON report here instead of stdout");
  simulate_cmd->add_option("--csv", simo.csv_out, "Write one CSV row per replication here");
  simulate_cmd->add_option("--emit-log", simo.emit_log, "Write one replication's event log here");
  simulate_cmd->add_option("--replication", simo.replication, "Replication index for --emit-log");

  std::string format = "markdown";
  std::string out_dir;
  auto* report_cmd = app.add_subcommand("report", "Export standings, matrix, judge summary");
  report_cmd->add_option("--dir", dir, "Tournament directory");
  report_cmd->add_option("--format", format, "markdown or csv");
  report_cmd->add_option("--out", out_dir, "Output directory (default <dir>/reports)");

  std::string log_path;
  auto* verify_cmd = app.add_subcommand("verify-replay", "Replay the log twice and compare");
  verify_cmd->add_option("--dir", dir, "Tournament directory");
  verify_cmd->add_option("--log", log_path, "Log file (default <dir>/events.jsonl)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("promptgauntlet");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*init_cmd) return cmd_init(init, out);
    if (*templates_add) return cmd_templates_add(dir, template_files, out, err);
    if (*ingest_cmd) return cmd_ingest(dir, ingest_file, out, err);
    if (*generate_cmd) {
      if (*seed_opt) gen.seed = gen_seed;
      return cmd_generate(gen, out, err);
    }
    if (*serve_cmd) return cmd_serve(dir, bind, ui_dir, out, err);
    if (*simulate_cmd) return cmd_simulate(simo, out);
    if (*report_cmd) return cmd_report(dir, format, out_dir, out);
    if (*verify_cmd) return cmd_verify_replay(dir, log_path, out, err);
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return kExitOperational;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kExitOperational;
  }
  print_error(err, "usage", "no subcommand");
  return kExitUsage;
}

}  // namespace gauntlet::cli
