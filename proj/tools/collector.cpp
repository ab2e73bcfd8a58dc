// collector: run the ingestion service, drive synthetic sessions, export
// stored streams and compute feature files.

#include <pthread.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "collector/client.hpp"
#include "collector/error.hpp"
#include "collector/event_store.hpp"
#include "collector/feature_report.hpp"
#include "collector/ingestion_service.hpp"
#include "collector/record_io.hpp"
#include "collector/simulator.hpp"
#include "httplib.h"

namespace {

using namespace collector;

constexpr std::int64_t kMinTime = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMaxTime = std::numeric_limits<std::int64_t>::max();

struct ServeOptions {
  std::string addr = "127.0.0.1:8080";
  std::string store = "collector.log";
  std::string admin_user;
  std::string admin_pass;
  std::string port_file;
  bool fsync = false;
};

struct SimulateOptions {
  std::string profile;
  std::string target = "http://127.0.0.1:8080";
  std::string user;
  std::string pass;
};

struct ExportOptions {
  std::string target = "http://127.0.0.1:8080";
  std::string user;
  std::string login;
  std::string pass;
  std::string kind = "keystroke";
  std::int64_t from = kMinTime;
  std::int64_t to = kMaxTime;
  std::string format = "jsonl";
  std::string out;
};

struct FeaturesOptions {
  std::string in;
  std::string store;
  std::string user;
  std::string mode = "bigraph";
  std::string format;
  std::string out;
  std::int64_t from = kMinTime;
  std::int64_t to = kMaxTime;
};

bool split_addr(const std::string& addr, std::string& host, int& port) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) return false;
  host = addr.substr(0, colon);
  try {
    std::size_t used = 0;
    port = std::stoi(addr.substr(colon + 1), &used);
    return used == addr.size() - colon - 1 && port >= 0 && port <= 65535;
  } catch (const std::exception&) {
    return false;
  }
}

// Writes to `path`, or stdout for "" / "-".
int write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) {
    std::cerr << "error: cannot write " << path << '\n';
    return 1;
  }
  return 0;
}

int cmd_serve(const ServeOptions& options) {
  std::string host;
  int port = 0;
  if (!split_addr(options.addr, host, port)) {
    std::cerr << "error: --addr must be host:port, got '" << options.addr << "'\n";
    return 2;
  }

  // Signals are taken synchronously by this thread; block them before any
  // worker thread exists so they inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<EventStore> store;
  std::unique_ptr<IngestionService> service;
  try {
    store = open_log_store(options.store, LogStoreOptions{options.fsync});
    service = std::make_unique<IngestionService>(*store, ServiceConfig{options.admin_user, options.admin_pass});
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  httplib::Server server;
  service->install_routes(server);
  if (port == 0) {
    port = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    port = -1;
  }
  if (port < 0) {
    std::cerr << "error: cannot listen on " << options.addr << " (address in use or not permitted)\n";
    return 1;
  }
  if (!options.port_file.empty()) std::ofstream(options.port_file) << port << '\n';
  spdlog::info("listening on {}:{} with store {}", host, port, options.store);

  std::thread worker([&server] {
    server.listen_after_bind();
    // Wake the signal wait if the listener stops on its own.
    kill(getpid(), SIGTERM);
  });
  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  worker.join();

  try {
    store->flush();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  spdlog::info("shut down after signal {}; {} events stored", received, store->total_events());
  return 0;
}

int cmd_simulate(const SimulateOptions& options) {
  try {
    const auto profile = load_profile(options.profile);
    CollectorClient client(options.target);
    const auto result = run_simulation(profile, client, options.user, options.pass);
    std::cout << "sent " << result.sent << " accepted " << result.accepted << '\n';
    return result.accepted == result.sent ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_export(const ExportOptions& options) {
  const auto kind = parse_event_kind(options.kind);
  const auto format = parse_file_format(options.format);
  if (!kind || !format) {
    std::cerr << "error: --kind must be keystroke|mouse and --format jsonl|csv\n";
    return 2;
  }
  try {
    CollectorClient client(options.target);
    const auto login = options.login.empty() ? options.user : options.login;
    const auto session = client.login(login, options.pass);
    if (!session.ok()) {
      std::cerr << "error: login failed: " << session.body << '\n';
      return 1;
    }
    const auto reply = client.export_events(options.user, *kind, options.from, options.to, *format);
    client.logout();
    if (!reply.ok()) {
      std::cerr << "error: export failed (" << reply.status << "): " << reply.body << '\n';
      return 1;
    }
    return write_output(options.out, reply.body);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_features(const FeaturesOptions& options) {
  const auto mode = parse_feature_mode(options.mode);
  if (!mode) {
    std::cerr << "error: --mode must be bigraph or mouse-speed\n";
    return 2;
  }
  auto format_text = options.format;
  if (format_text.empty()) {
    format_text = std::filesystem::path(options.out).extension() == ".jsonl" ? "jsonl" : "csv";
  }
  const auto format = parse_file_format(format_text);
  if (!format) {
    std::cerr << "error: --format must be jsonl or csv\n";
    return 2;
  }
  if (options.in.empty() == options.store.empty()) {
    std::cerr << "error: give exactly one of --in or --store\n";
    return 2;
  }

  try {
    std::string content;
    if (!options.in.empty()) {
      std::ifstream in(options.in, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot open " << options.in << '\n';
        return 1;
      }
      const auto file = read_records(in);
      const auto label = options.user.empty() ? std::filesystem::path(options.in).stem().string() : options.user;
      std::ostringstream out;
      const auto summary = write_features(out, label, *mode, file.records, *format);
      if (summary.skipped_pairs > 0) {
        std::cerr << "skipped " << summary.skipped_pairs << " mouse pairs with non-positive elapsed time\n";
      }
      content = out.str();
    } else {
      if (options.user.empty()) {
        std::cerr << "error: --store needs --user\n";
        return 2;
      }
      const auto store = open_log_store(options.store, LogStoreOptions{.read_only = true});
      content = *mode == FeatureMode::kBigraph
                    ? keystroke_feature_report(*store, options.user, options.from, options.to, *format)
                    : mouse_feature_report(*store, options.user, options.from, options.to, *format);
    }
    return write_output(options.out, content);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioural telemetry collector: ingestion service, simulator and feature extraction"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->envname("COLLECTOR_LOG_LEVEL");

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP ingestion service until SIGINT/SIGTERM");
  serve_cmd->add_option("--addr", serve.addr, "host:port to listen on (port 0 picks a free port)")
      ->envname("COLLECTOR_ADDR")
      ->capture_default_str();
  serve_cmd->add_option("--store", serve.store, "event store file")->envname("COLLECTOR_STORE")->capture_default_str();
  serve_cmd->add_option("--admin-user", serve.admin_user, "account allowed to export any user")
      ->envname("COLLECTOR_ADMIN_USER");
  serve_cmd->add_option("--admin-pass", serve.admin_pass, "admin password")->envname("COLLECTOR_ADMIN_PASS");
  serve_cmd->add_option("--port-file", serve.port_file, "write the bound port to this file");
  serve_cmd->add_flag("--fsync", serve.fsync, "fsync the store after every append");

  SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Send a synthetic session described by a profile file");
  simulate_cmd->add_option("--profile", simulate.profile, "profile file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--target", simulate.target, "service base URL")->capture_default_str();
  simulate_cmd->add_option("--user", simulate.user, "account name")->required();
  simulate_cmd->add_option("--pass", simulate.pass, "account password")->required()->envname("COLLECTOR_PASS");

  ExportOptions exp;
  auto* export_cmd = app.add_subcommand("export", "Download a user's stored stream");
  export_cmd->add_option("--target", exp.target, "service base URL")->capture_default_str();
  export_cmd->add_option("--user", exp.user, "whose data to export")->required();
  export_cmd->add_option("--login", exp.login, "account to log in as (default: --user)");
  export_cmd->add_option("--pass", exp.pass, "password of the login account")->required()->envname("COLLECTOR_PASS");
  export_cmd->add_option("--kind", exp.kind, "keystroke|mouse")->capture_default_str();
  export_cmd->add_option("--from", exp.from, "inclusive lower bound, client ms");
  export_cmd->add_option("--to", exp.to, "exclusive upper bound, client ms");
  export_cmd->add_option("--format", exp.format, "jsonl|csv")->capture_default_str();
  export_cmd->add_option("--out", exp.out, "output file (default stdout)");

  FeaturesOptions features;
  auto* features_cmd = app.add_subcommand("features", "Compute bigraph or mouse-speed features");
  features_cmd->add_option("--in", features.in, "exported JSONL or CSV file");
  features_cmd->add_option("--store", features.store, "read directly from a store file instead");
  features_cmd->add_option("--user", features.user, "user label (and store user); default: input file stem");
  features_cmd->add_option("--mode", features.mode, "bigraph|mouse-speed")->capture_default_str();
  features_cmd->add_option("--format", features.format, "csv|jsonl (default from --out extension, else csv)");
  features_cmd->add_option("--out", features.out, "output file (default stdout)");
  features_cmd->add_option("--from", features.from, "store window start, client ms");
  features_cmd->add_option("--to", features.to, "store window end (exclusive), client ms");

  CLI11_PARSE(app, argc, argv);
  // stdout carries exported data; diagnostics go to stderr.
  spdlog::set_default_logger(spdlog::stderr_color_mt("collector"));
  set_log_level(log_level);

  if (*serve_cmd) return cmd_serve(serve);
  if (*simulate_cmd) return cmd_simulate(simulate);
  if (*export_cmd) return cmd_export(exp);
  return cmd_features(features);
}
