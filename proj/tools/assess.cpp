// Administers and scores the evaluations against the simulator, and computes
// the study statistics. Every subcommand prints a summary; tables go to CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "surrogate/assess/datasets.hpp"
#include "surrogate/assess/fitts.hpp"
#include "surrogate/assess/harness.hpp"
#include "surrogate/assess/wilcoxon.hpp"

using namespace surrogate;
using nlohmann::json;

namespace {

// Minimal clinically important differences, quoted for annotation only.
constexpr double kMcidLow = 5.7;
constexpr double kMcidHigh = 12.0;

struct Common {
  std::string config_dir = SURROGATE_CONFIG_DIR;
  std::string agent = "expert";
  std::uint64_t seed = 11;
  std::string log_path;
  std::string out_dir = ".";
  std::string participant = "sim";
};

AgentOptions agent_options(const Common& c) {
  if (c.agent == "expert") return {};
  if (c.agent == "mid") return mid_skill_options(c.seed);
  throw std::invalid_argument("unknown agent '" + c.agent + "' (expert or mid)");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

std::unique_ptr<Sink> make_sink(const std::string& path) {
  struct Discard : Sink {
    void write(const LogRecord&) override {}
  };
  if (path.empty()) return std::make_unique<Discard>();
  return std::make_unique<FileSink>(path);
}

std::filesystem::path out_file(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  return std::filesystem::path(c.out_dir) / name;
}

int arat_cmd(const Common& c, const std::string& side_text, const std::string& schedule_path,
             const std::string& items_path) {
  const Side side = parse_side(side_text);
  const AratConfig config = load_arat_config(items_path.empty() ? c.config_dir + "/arat_items.json" : items_path);
  const auto schedule = schedule_path.empty() ? default_schedule(config) : parse_schedule(read_json_file(schedule_path), config);

  auto robot = std::make_shared<const RobotDescription>(load_robot_description(c.config_dir + "/robot.json"));
  Session session(robot, load_scene(c.config_dir + "/scenes/arat.json", *robot));
  auto sink = make_sink(c.log_path);
  Recorder recorder("arat-" + c.participant + "-" + std::string(to_string(side)), *sink);
  RecordedSession recorded(session, recorder);
  CoreOptions co;
  co.restriction = Restriction::arat(side);
  TeleopCore core(recorded, co);

  const AratRun run = run_arat(core, config, side, schedule, arat_expert, agent_options(c));
  sink->flush();

  std::printf("ARAT, %s side, %s agent, restriction %s\n", std::string(to_string(side)).c_str(), c.agent.c_str(),
              co.restriction.describe().c_str());
  std::printf("%-22s %-6s %-9s %10s %5s  %s\n", "item", "scale", "feasible", "elapsed_s", "score", "note");
  for (const auto& row : run.sheet.rows) {
    std::printf("%-22s %-6s %-9s %10.2f %5d  %s\n", row.item.id.c_str(), std::string(to_string(row.item.subscale)).c_str(),
                row.item.feasible ? "yes" : "no", row.outcome.elapsed, row.score, row.outcome.aborted.c_str());
  }
  std::printf("total %d / expected max %d / %d\n\n%s", run.sheet.total, run.sheet.expected_max, run.sheet.maximum,
              expected_max_derivation(config).c_str());

  const std::string stem = "arat_" + c.participant + "_" + std::string(to_string(side));
  json sheet = to_json(run.sheet);
  sheet["participant"] = c.participant;
  std::ofstream(out_file(c, stem + ".json")) << sheet.dump(2) << "\n";
  write_csv(out_file(c, stem + "_s2.csv"), Dataset::s2, s2_rows(c.participant, run.sheet));
  std::cout << "wrote " << out_file(c, stem + ".json").string() << " and " << stem << "_s2.csv\n";
  return 0;
}

int selfcare_cmd(const Common& c, const std::string& scene_path, double timeout) {
  auto robot = std::make_shared<const RobotDescription>(load_robot_description(c.config_dir + "/robot.json"));
  Session session(robot, load_scene(scene_path.empty() ? c.config_dir + "/scenes/selfcare.json" : scene_path, *robot));
  auto sink = make_sink(c.log_path);
  Recorder recorder("selfcare-" + c.participant, *sink);
  RecordedSession recorded(session, recorder);
  TeleopCore core(recorded);

  const SelfcareResult r = run_selfcare(core, [](Agent& a) { selfcare_expert(a); }, agent_options(c), timeout);
  sink->flush();
  const auto show = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("-"); };
  std::printf("self-care, %s agent: %s\n", c.agent.c_str(), r.success ? "SUCCESS" : "not completed");
  std::printf("  straw tip to mouth  %s m (success below %.3f m, bottle held)\n", show(r.distance).c_str(), kSelfcareTolerance);
  std::printf("  grasp and lift      %s s\n", show(r.phases.grasp_lift).c_str());
  std::printf("  delivery            %s s\n", show(r.phases.delivery).c_str());
  std::printf("  total               %s s\n", show(r.phases.total).c_str());
  std::printf("  agent time          %.2f s\n", r.elapsed);
  if (!r.failure.empty()) std::printf("  agent stopped: %s\n", r.failure.c_str());
  if (!c.log_path.empty()) std::printf("  log %s\n", c.log_path.c_str());
  return r.success ? 0 : 3;
}

std::vector<FittsTrial> trials_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto rows = read_csv(in);
  if (rows.empty()) throw std::runtime_error(path + ": empty");
  const std::vector<std::string> want{"distance", "width", "movement_time", "endpoint"};
  std::vector<std::size_t> at;
  for (const auto& name : want) {
    const auto it = std::find(rows[0].begin(), rows[0].end(), name);
    if (it == rows[0].end()) throw std::runtime_error(path + ": missing column '" + name + "'");
    at.push_back(std::size_t(it - rows[0].begin()));
  }
  std::vector<FittsTrial> trials;
  for (std::size_t i = 1; i < rows.size(); ++i)
    trials.push_back({std::stod(rows[i].at(at[0])), std::stod(rows[i].at(at[1])), std::stod(rows[i].at(at[2])),
                      std::stod(rows[i].at(at[3]))});
  return trials;
}

// {"distances": [...], "widths": [...], "per_condition": 15, "seed": 3, "model": {...}}
std::vector<FittsTrial> trials_from_conditions(const std::string& path) {
  const json j = read_json_file(path);
  const auto distances = j.at("distances").get<std::vector<double>>();
  const auto widths = j.at("widths").get<std::vector<double>>();
  CursorModel m;
  if (j.contains("model")) {
    const json& mj = j["model"];
    m.noise = mj.value("noise", m.noise);
    m.reaction = mj.value("reaction", m.reaction);
    m.time_per_sqrt_px = mj.value("time_per_sqrt_px", m.time_per_sqrt_px);
    m.click = mj.value("click", m.click);
    m.max_submovements = mj.value("max_submovements", m.max_submovements);
  }
  return simulate_pointing(distances, widths, j.value("per_condition", std::size_t{15}), m, j.value("seed", std::uint64_t{3}));
}

int fitts_cmd(const Common& c, const std::string& conditions, const std::string& trials_path) {
  if (conditions.empty() == trials_path.empty()) throw std::invalid_argument("give exactly one of --conditions or --trials");
  const auto trials = trials_path.empty() ? trials_from_conditions(conditions) : trials_from_csv(trials_path);
  const FittsResult r = fitts_throughput(trials);
  std::printf("%8s %8s %6s %10s %10s %8s %10s %8s\n", "D_px", "W_px", "n", "sd_px", "We_px", "IDe", "MT_s", "TP");
  for (const auto& k : r.conditions)
    std::printf("%8.1f %8.1f %6zu %10.2f %10.2f %8.3f %10.3f %8.3f\n", k.distance, k.width, k.trials, k.endpoint_sd,
                k.effective_width, k.effective_id, k.mean_time, k.throughput);
  std::printf("throughput %.3f bits/s (mean over %zu conditions)\n", r.throughput, r.conditions.size());

  const auto path = out_file(c, "fitts_" + c.participant + "_trials.csv");
  std::ofstream out(path);
  out << "distance,width,movement_time,endpoint\n";
  for (const auto& t : trials) out << t.distance << "," << t.width << "," << t.movement_time << "," << t.endpoint << "\n";
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

std::vector<double> column(const std::vector<CsvRow>& rows, const std::string& name) {
  const auto it = std::find(rows.at(0).begin(), rows.at(0).end(), name);
  if (it == rows[0].end()) throw std::runtime_error("no column '" + name + "'");
  const std::size_t k = std::size_t(it - rows[0].begin());
  std::vector<double> v;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].at(k).empty()) throw std::runtime_error("row " + std::to_string(i) + ": empty '" + name + "'");
    v.push_back(std::stod(rows[i][k]));
  }
  return v;
}

int wilcoxon_cmd(const std::string& data, const std::string& x_name, const std::string& y_name,
                 const std::string& tail_text, std::optional<double> reported, int digits) {
  std::ifstream in(data);
  if (!in) throw std::runtime_error("cannot open " + data);
  const auto rows = read_csv(in);
  const auto x = column(rows, x_name);
  const auto y = column(rows, y_name);
  if (tail_text != "greater" && tail_text != "less") throw std::invalid_argument("--tail is greater or less");
  const Tail tail = tail_text == "greater" ? Tail::greater : Tail::less;
  const WilcoxonResult r = wilcoxon_signed_rank(x, y, tail);
  std::printf("Wilcoxon signed-rank, x = %s, y = %s\n%s", x_name.c_str(), y_name.c_str(), describe(r, tail).c_str());

  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) d.push_back(x[i] - y[i]);
  std::sort(d.begin(), d.end());
  const double median = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  const std::size_t low = std::count_if(d.begin(), d.end(), [](double v) { return v >= kMcidLow; });
  const std::size_t high = std::count_if(d.begin(), d.end(), [](double v) { return v >= kMcidHigh; });
  std::printf("  median difference %.2f; %zu of %zu at or above MCID %.1f, %zu at or above %.0f\n", median, low, d.size(),
              kMcidLow, high, kMcidHigh);
  if (reported) std::cout << check_reported_p(r, tail, *reported, digits);
  return 0;
}

std::vector<ParticipantRow> participants_from_json(const json& j) {
  std::vector<ParticipantRow> out;
  for (const auto& e : j) {
    ParticipantRow p;
    p.participant = e.at("participant").get<std::string>();
    if (e.contains("arat_without")) p.arat_without = e["arat_without"].get<int>();
    if (e.contains("arat_with")) p.arat_with = e["arat_with"].get<int>();
    if (e.contains("selfcare_success")) p.selfcare_success = e["selfcare_success"].get<bool>();
    if (e.contains("selfcare_seconds")) p.selfcare_seconds = e["selfcare_seconds"].get<double>();
    if (e.contains("fitts_throughput")) p.fitts_throughput = e["fitts_throughput"].get<double>();
    out.push_back(std::move(p));
  }
  return out;
}

int export_cmd(const Common& c, const std::string& participants, const std::vector<std::string>& sheets,
               const std::vector<std::string>& logs, const std::string& labels, const std::string& items_path) {
  const auto s1 = participants.empty() ? std::vector<CsvRow>{} : s1_rows(participants_from_json(read_json_file(participants)));
  write_csv(out_file(c, "S1.csv"), Dataset::s1, s1);

  std::vector<CsvRow> s2;
  if (!sheets.empty()) {
    const AratConfig config = load_arat_config(items_path.empty() ? c.config_dir + "/arat_items.json" : items_path);
    for (const auto& path : sheets) {
      const json j = read_json_file(path);
      const std::string who = j.value("participant", std::filesystem::path(path).stem().string());
      for (auto& row : s2_rows(who, sheet_from_json(j, config))) s2.push_back(std::move(row));
    }
  }
  write_csv(out_file(c, "S2.csv"), Dataset::s2, s2);

  std::vector<CsvRow> s3;
  if (!logs.empty() && labels.empty()) throw std::invalid_argument("--log needs --labels");
  for (const auto& path : logs) {
    const Timeline tl = read_log(path);
    const std::string session = tl.header ? tl.header->session : std::filesystem::path(path).stem().string();
    for (auto& row : s3_rows(session, rollup(tl, load_labels(labels)))) s3.push_back(std::move(row));
  }
  write_csv(out_file(c, "S3.csv"), Dataset::s3, s3);
  std::printf("S1.csv %zu rows, S2.csv %zu rows, S3.csv %zu rows in %s\n", s1.size(), s2.size(), s3.size(), c.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"assess: ARAT, self-care and pointing evaluations against the simulator, plus statistics"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--config-dir", c.config_dir, "robot, scene and item configuration")->capture_default_str();
  app.add_option("--out-dir", c.out_dir, "where tables are written")->capture_default_str();
  app.add_option("--participant", c.participant, "participant id for the exported rows")->capture_default_str();

  std::string side = "right", schedule, items;
  auto* arat = app.add_subcommand("arat", "administer the modified ARAT with a scripted agent");
  arat->add_option("--side", side, "left or right")->capture_default_str()->check(CLI::IsMember({"left", "right"}));
  arat->add_option("--schedule", schedule, "JSON list of item ids (default: every item in order)")->check(CLI::ExistingFile);
  arat->add_option("--items", items, "item feasibility config (default: config/arat_items.json)")->check(CLI::ExistingFile);
  arat->add_option("--agent", c.agent, "expert or mid")->capture_default_str();
  arat->add_option("--seed", c.seed, "mid-skill agent seed")->capture_default_str();
  arat->add_option("--log", c.log_path, "write the session log here");

  std::string scene;
  double timeout = 600.0;
  auto* selfcare = app.add_subcommand("selfcare", "run the self-care task with a scripted agent");
  selfcare->add_option("--scene", scene, "scene file (default: config/scenes/selfcare.json)")->check(CLI::ExistingFile);
  selfcare->add_option("--agent", c.agent, "expert or mid")->capture_default_str();
  selfcare->add_option("--seed", c.seed, "mid-skill agent seed")->capture_default_str();
  selfcare->add_option("--timeout", timeout, "s of simulated time")->capture_default_str();
  selfcare->add_option("--log", c.log_path, "write the session log here");

  std::string conditions, trials;
  auto* fitts = app.add_subcommand("fitts", "pointing throughput from simulated or recorded trials");
  fitts->add_option("--conditions", conditions, "JSON: distances, widths, per_condition, seed, model")->check(CLI::ExistingFile);
  fitts->add_option("--trials", trials, "CSV: distance,width,movement_time,endpoint")->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "study statistics");
  stats->require_subcommand(1);
  std::string data, x_name = "arat_with", y_name = "arat_without", tail = "greater";
  std::optional<double> reported;
  int digits = 2;
  auto* wilcoxon = stats->add_subcommand("wilcoxon", "one-sided paired signed-rank test");
  wilcoxon->add_option("data", data, "CSV with a header row (e.g. S1.csv)")->required()->check(CLI::ExistingFile);
  wilcoxon->add_option("--x", x_name, "column of the first sample")->capture_default_str();
  wilcoxon->add_option("--y", y_name, "column of the second sample")->capture_default_str();
  wilcoxon->add_option("--tail", tail, "greater (x > y) or less")->capture_default_str();
  wilcoxon->add_option("--reported-p", reported, "a published p to check against each convention");
  wilcoxon->add_option("--digits", digits, "significant digits the published p was printed with")->capture_default_str();

  std::string participants, labels;
  std::vector<std::string> sheets, logs;
  auto* exp = app.add_subcommand("export", "write S1/S2/S3 tables (header-only when an input is absent)");
  exp->add_option("--participants", participants, "JSON list of per-participant results (S1)")->check(CLI::ExistingFile);
  exp->add_option("--sheet", sheets, "ARAT score sheet JSON from 'assess arat' (S2), repeatable")->check(CLI::ExistingFile);
  exp->add_option("--items", items, "item feasibility config for the sheets")->check(CLI::ExistingFile);
  exp->add_option("--log", logs, "session log (S3), repeatable")->check(CLI::ExistingFile);
  exp->add_option("--labels", labels, "task labels for the logs")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (arat->parsed()) return arat_cmd(c, side, schedule, items);
    if (selfcare->parsed()) return selfcare_cmd(c, scene, timeout);
    if (fitts->parsed()) return fitts_cmd(c, conditions, trials);
    if (wilcoxon->parsed()) return wilcoxon_cmd(data, x_name, y_name, tail, reported, digits);
    return export_cmd(c, participants, sheets, logs, labels, items);
  } catch (const RefusedToStart& e) {
    std::cerr << "assess: refused to start: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "assess: " << e.what() << "\n";
    return 1;
  }
}
