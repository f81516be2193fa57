// Offline tools for session logs: frame rendering, task rollups and record statistics.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "surrogate/sim/render.hpp"
#include "surrogate/telemetry/rollup.hpp"

using namespace surrogate;

namespace {

double seconds(Micros t) { return std::chrono::duration<double>(t).count(); }

const WorldObject* find_geometry(const Scene& scene, const std::string& id) {
  if (const WorldObject* o = scene.find(id)) return o;
  for (const auto& item : scene.items)
    for (const auto& o : item.objects)
      if (o.id == id) return &o;
  return nullptr;
}

int render(const std::string& log_path, const std::string& out_dir, std::optional<double> at, bool skip) {
  const Timeline tl = read_log(log_path, skip ? ReplayMode::skip : ReplayMode::strict);
  if (!tl.header) throw std::runtime_error("log has no header");
  const auto session = session_from_header(*tl.header);
  const Scene& scene = session->full_scene();
  std::filesystem::create_directories(out_dir);

  std::size_t written = 0;
  for (const auto& r : tl.records) {
    if (r.kind != RecordKind::frame) continue;
    const double t = seconds(r.t - tl.start());
    if (at && std::abs(t - *at) > 2.0) continue;  // frames are 4 s apart
    std::vector<WorldObject> objects;
    for (const auto& e : r.data.at("objects")) {
      const WorldObject* geometry = find_geometry(scene, e.at("id").get<std::string>());
      if (!geometry) continue;
      WorldObject o = *geometry;
      o.pose = pose_from_json(e);
      objects.push_back(std::move(o));
    }
    const CameraModel camera =
        rescaled(session->world().robot().camera, r.data.at("width").get<int>(), r.data.at("height").get<int>());
    const Image image = render_view(objects, camera, pose_from_json(r.data.at("camera")));
    char name[64];
    std::snprintf(name, sizeof name, "frame_%08.2f.ppm", t);
    write_ppm(image, std::filesystem::path(out_dir) / name);
    std::cout << name << "  " << image.width << "x" << image.height << "\n";
    ++written;
  }
  std::cout << written << " frame(s) written to " << out_dir << "\n";
  return written ? 0 : 1;
}

void print_stats(const CommandStats& s, const std::string& indent) {
  for (const auto& [type, n] : s.by_type) std::cout << indent << type << ": " << n << "\n";
  for (const auto& [mode, n] : s.by_mode) std::cout << indent << "mode " << mode << ": " << n << "\n";
}

int rollup_cmd(const std::string& log_path, const std::string& labels_path, bool skip) {
  const Timeline tl = read_log(log_path, skip ? ReplayMode::skip : ReplayMode::strict);
  const std::vector<TaskLabel> labels = labels_path.empty() ? std::vector<TaskLabel>{} : load_labels(labels_path);
  const Rollup r = rollup(tl, labels);
  std::printf("session length %.2f s, %zu commands\n", r.session_length, r.overall.commands);
  if (r.tasks.empty()) {
    print_stats(r.overall, "  ");
    return 0;
  }
  std::printf("%-5s %-32s %-24s %9s %9s %9s %9s %8s\n", "level", "task", "parent", "start", "end", "duration",
              "children", "commands");
  for (const auto& t : r.tasks) {
    const std::string name = std::string(2 * (t.level - 1), ' ') + t.name;
    std::printf("%-5d %-32s %-24s %9.2f %9.2f %9.2f %9.2f %8zu\n", t.level, name.c_str(), t.parent.c_str(), t.start,
                t.end, t.duration, t.children_duration, t.stats.commands);
  }
  return 0;
}

int stats_cmd(const std::string& log_path, bool skip) {
  const Timeline tl = read_log(log_path, skip ? ReplayMode::skip : ReplayMode::strict);
  const double length = seconds(tl.duration());
  std::cout << "session " << (tl.header ? tl.header->session : std::string("(no header)")) << "\n";
  std::printf("duration %.2f s, %zu records\n", length, tl.records.size());
  for (RecordKind k : {RecordKind::command, RecordKind::joints, RecordKind::frame, RecordKind::diagnostics,
                       RecordKind::goal, RecordKind::contact}) {
    const std::size_t n = tl.count(k);
    std::printf("  %-12s %8zu", std::string(to_string(k)).c_str(), n);
    if (length > 0 && (k == RecordKind::joints || k == RecordKind::frame || k == RecordKind::diagnostics))
      std::printf("   %.3f Hz", double(n) / length);
    std::printf("\n");
  }
  const Rollup r = rollup(tl, {});
  print_stats(r.overall, "  ");
  for (const auto& issue : tl.skipped) std::cout << "skipped line " << issue.line << ": " << issue.message << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"log-tool: inspect teleoperation session logs"};
  app.require_subcommand(1);
  bool skip = false;
  app.add_flag("--skip-bad", skip, "drop malformed records instead of stopping at the first one");

  std::string log_path, out_dir = "frames", labels;
  std::optional<double> at;
  auto* render_app = app.add_subcommand("render", "render logged frames to PPM images");
  render_app->add_option("log", log_path, "session log (NDJSON)")->required()->check(CLI::ExistingFile);
  render_app->add_option("--out", out_dir, "output directory")->capture_default_str();
  render_app->add_option("--at", at, "only frames within 2 s of this time (s from the session start)");

  auto* rollup_app = app.add_subcommand("rollup", "per-task timing table from a label file");
  rollup_app->add_option("log", log_path, "session log (NDJSON)")->required()->check(CLI::ExistingFile);
  rollup_app->add_option("--labels", labels, "labels: 'level start end name' per line")->check(CLI::ExistingFile);

  auto* stats_app = app.add_subcommand("stats", "record counts, cadences and command mix");
  stats_app->add_option("log", log_path, "session log (NDJSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (render_app->parsed()) return render(log_path, out_dir, at, skip);
    if (rollup_app->parsed()) return rollup_cmd(log_path, labels, skip);
    return stats_cmd(log_path, skip);
  } catch (const std::exception& e) {
    std::cerr << "log-tool: " << e.what() << "\n";
    return 1;
  }
}
