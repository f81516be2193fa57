// Serves the simulated robot to browser clients over WebSocket.

#include <atomic>
#include <chrono>
#include <csignal>
#include <ctime>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "surrogate/server/ws_server.hpp"

using namespace surrogate;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct DiscardSink : Sink {
  void write(const LogRecord&) override {}
};

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", std::localtime(&t));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-server: simulated mobile manipulator behind the teleoperation protocol"};
  std::string config_dir = SURROGATE_CONFIG_DIR;
  std::string robot_path, scene_path, static_dir, log_dir, restriction_text = "full", token = "surrogate", admin_token;
  std::string address = "0.0.0.0";
  unsigned short port = 8080;
  double rate_hz = 50.0, speed = 1.0, battery_hours = 8.0, duration = 0.0;
  bool charging = false, stop_on_contact = false;
  app.add_option("--port", port, "listen port (0 picks a free one)")->capture_default_str();
  app.add_option("--address", address, "listen address")->capture_default_str();
  app.add_option("--token", token, "session token clients must present")->capture_default_str();
  app.add_option("--admin-token", admin_token, "token for admin messages; empty disables them");
  app.add_option("--restriction", restriction_text, "full or arat(left|right)")->capture_default_str();
  app.add_option("--robot", robot_path, "robot description (default: config/robot.json)");
  app.add_option("--scene", scene_path, "scene file (default: config/scenes/selfcare.json)");
  app.add_option("--static-dir", static_dir, "client assets to serve over HTTP");
  app.add_option("--log-dir", log_dir, "write a session log here");
  app.add_option("--rate", rate_hz, "simulation ticks per simulated second")->capture_default_str()->check(CLI::Range(1.0, 1000.0));
  app.add_option("--speed", speed, "simulated seconds per wall-clock second")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--battery-hours", battery_hours, "battery life at full load")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--charging", charging, "start with the charger connected");
  app.add_flag("--stop-on-contact", stop_on_contact, "halt arm motion on tactile contact");
  app.add_option("--duration", duration, "exit after this many wall-clock seconds (0 runs until interrupted)");
  CLI11_PARSE(app, argc, argv);

  const auto restriction = parse_restriction(restriction_text);
  if (!restriction) {
    std::cerr << "bad --restriction '" << restriction_text << "'\n";
    return 2;
  }
  if (robot_path.empty()) robot_path = config_dir + "/robot.json";
  if (scene_path.empty()) scene_path = config_dir + "/scenes/selfcare.json";

  try {
    auto robot = std::make_shared<const RobotDescription>(load_robot_description(robot_path));
    WorldOptions wo;
    wo.battery_hours = battery_hours;
    wo.stop_on_contact = stop_on_contact;
    const auto tick = std::chrono::duration_cast<Micros>(std::chrono::duration<double>(1.0 / rate_hz));
    Session session(robot, load_scene(scene_path, *robot), wo, ControllerConfig{}, tick);
    session.world().set_charging(charging);

    const std::string id = "session-" + timestamp();
    std::unique_ptr<Sink> sink;
    if (log_dir.empty()) {
      sink = std::make_unique<DiscardSink>();
    } else {
      std::filesystem::create_directories(log_dir);
      sink = std::make_unique<FileSink>(std::filesystem::path(log_dir) / (id + ".ndjson"));
    }
    Recorder recorder(id, *sink);
    RecordedSession recorded(session, recorder);

    CoreOptions co;
    co.token = token;
    co.admin_token = admin_token;
    co.restriction = *restriction;
    TeleopCore core(recorded, co);

    ServerOptions so;
    so.address = address;
    so.port = port;
    so.static_dir = static_dir;
    so.rate = speed;
    WsServer server(core, so);
    server.start();
    std::cout << "listening on " << address << ":" << server.port() << " (restriction " << restriction->describe()
              << ", scene " << scene_path << ")" << std::endl;
    if (!log_dir.empty()) std::cout << "logging to " << static_cast<FileSink*>(sink.get())->path() << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto start = std::chrono::steady_clock::now();
    while (!g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      if (duration > 0 && std::chrono::steady_clock::now() - start >= std::chrono::duration<double>(duration)) break;
    }
    server.stop();
    sink->flush();
    std::cout << "stopped after " << server.ticks() << " ticks" << std::endl;
  } catch (const std::exception& e) {
    std::cerr << "surrogate-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
