// avatar: generate evaluation sessions, replay them through the alignment
// solvers, and stream them over TCP.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "avatar/config.hpp"
#include "avatar/relay.hpp"
#include "avatar/run.hpp"

using namespace avatar;

namespace {

int serve(const std::string& session_path, std::optional<double> rate, const std::string& bind,
          std::size_t wait_for) {
  Session session;
  try {
    session = read_session(std::filesystem::path(session_path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  RelayConfig rc;
  rc.bind = bind;
  rc.rate_hz = rate.value_or(session.rate_hz);
  rc.header_rate_hz = session.rate_hz;
  rc.wait_for_subscribers = wait_for;
  try {
    RelayServer server(rc, session_source(std::move(session)));
    std::cerr << "listening on " << parse_endpoint(bind).host << ':' << server.port() << '\n';
    server.start();
    server.wait();
    const RelayStats s = server.stats();
    std::cerr << "sent " << s.frames << " frames to " << s.subscribers << " subscribers (" << s.dropped
              << " dropped)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

int subscribe(const std::string& addr, std::optional<double> beta, std::size_t count, const std::string& out_path) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return kExitInput;
    }
    out = &file;
  }
  try {
    SubscribeOptions opts;
    opts.filter_beta = beta;
    RelaySubscriber sub(addr, opts);
    *out << format_header(sub.rate()) << '\n';
    std::size_t received = 0;
    while (count == 0 || received < count) {
      const auto item = sub.next();
      if (!item) break;
      if (item->kind == StreamItem::Kind::BadLine) {
        std::cerr << "warning: skipped " << item->error << '\n';
        continue;
      }
      *out << format_frame(item->frame) << '\n';
      ++received;
    }
    out->flush();
  } catch (const TransportError& e) {
    std::cerr << "error: transport: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human arm model to robot arm alignment toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);

  std::string poses_out = "poses.avtr";
  auto* poses = app.add_subcommand("poses", "write the 12-pose static catalog as a session file");
  poses->add_option("-o,--out", poses_out, "output session file");

  std::string therapy_out = "therapy.avtr";
  double duration = 20.0;
  double rate = 100.0;
  auto* therapy = app.add_subcommand("therapy", "write the emulated elbow-flexion therapy session");
  therapy->add_option("-o,--out", therapy_out, "output session file");
  therapy->add_option("--duration", duration, "seconds")->capture_default_str();
  therapy->add_option("--rate", rate, "frames per second")->capture_default_str();

  RunSpec spec;
  std::string solver = "all";
  std::string input = "catalog";
  bool no_overlay = false;
  bool reset_state = false;
  bool keep_state = false;
  auto* run = app.add_subcommand("run", "replay a session through the solvers and write metrics CSVs");
  run->add_option("--solver", solver, "onia, jacobian, fabrik or all")->capture_default_str();
  run->add_option("--input", input, "catalog, therapy or a session file path")->capture_default_str();
  run->add_option("--duration", spec.therapy_duration, "therapy duration, seconds")->capture_default_str();
  run->add_option("--rate", spec.therapy_rate, "therapy rate, Hz")->capture_default_str();
  run->add_option("--metrics", spec.metrics_out, "per-frame CSV")->capture_default_str();
  run->add_option("--summary", spec.summary_out, "per-solver summary CSV")->capture_default_str();
  run->add_flag("--no-overlay", no_overlay, "skip the overlay ratio");
  bool settle = false;
  bool no_settle = false;
  auto* settle_flag = run->add_flag("--settle", settle, "re-solve each frame as a held pose until the arm stops moving");
  run->add_flag("--no-settle", no_settle, "solve each frame once")->excludes(settle_flag);
  run->add_option("--settle-max", spec.settle_max, "solve cap per held frame")->capture_default_str();
  auto* reset_flag = run->add_flag("--reset-state", reset_state, "restart stateful solvers every frame");
  run->add_flag("--keep-state", keep_state, "carry solver state across frames")->excludes(reset_flag);

  std::string serve_session;
  std::optional<double> serve_rate;
  std::string bind = "127.0.0.1:7600";
  std::size_t wait_for = 0;
  auto* serve_cmd = app.add_subcommand("serve", "stream a session file to subscribers");
  serve_cmd->add_option("--session", serve_session, "session file")->required();
  serve_cmd->add_option("--rate", serve_rate, "frames per second (default: the file's rate)");
  serve_cmd->add_option("--bind", bind, "address:port")->capture_default_str();
  serve_cmd->add_option("--wait", wait_for, "hold the stream until this many subscribers connect");

  std::string addr = "127.0.0.1:7600";
  std::optional<double> beta;
  std::size_t count = 0;
  std::string sub_out = "-";
  auto* sub_cmd = app.add_subcommand("subscribe", "receive frames from a relay and print them as a session");
  sub_cmd->add_option("--addr", addr, "address:port")->capture_default_str();
  bool filter = false;
  sub_cmd->add_option("--filter-beta", beta, "low-pass the base pose with this coefficient");
  sub_cmd->add_flag("--filter", filter, "low-pass the base pose with filter.beta from the config");
  sub_cmd->add_option("--count", count, "stop after this many frames (0: until the stream ends)");
  sub_cmd->add_option("-o,--out", sub_out, "output file, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  Config config;
  if (!config_path.empty()) {
    try {
      config = load_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInput;
    }
  }

  if (*poses) return cmd_poses(config, poses_out, std::cerr);
  if (*therapy) return cmd_therapy(config, duration, rate, therapy_out, std::cerr);
  if (*run) {
    try {
      spec.solvers = parse_solvers(solver);
    } catch (const InputError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInput;
    }
    if (input == "catalog") {
      spec.input = InputKind::Catalog;
    } else if (input == "therapy") {
      spec.input = InputKind::Therapy;
    } else {
      spec.input = InputKind::File;
      spec.session_path = input;
    }
    spec.overlay = !no_overlay;
    if (reset_state) spec.reset_state = true;
    if (keep_state) spec.reset_state = false;
    if (settle) spec.settle = true;
    if (no_settle) spec.settle = false;
    return cmd_run(config, spec, std::cerr);
  }
  if (*serve_cmd) return serve(serve_session, serve_rate, bind, wait_for);
  if (*sub_cmd) {
    if (filter && !beta) beta = config.filter_beta;
    return subscribe(addr, beta, count, sub_out);
  }
  return kExitInput;
}
