#include <filesystem>
#include <fstream>
#include <sstream>

#include "control_support.hpp"
#include "surrogate/telemetry/recorded_session.hpp"
#include "surrogate/telemetry/replay.hpp"
#include "surrogate/telemetry/rollup.hpp"

using namespace surrogate;
using Eigen::Vector3d;

namespace {

Session make_session(const std::string& scene = "empty") { return Session(test::robot_ptr(), test::scene(scene)); }

void idle(RecordedSession& rs, double secs) {
  const int n = static_cast<int>(std::lround(secs / 0.02));
  for (int i = 0; i < n; ++i) rs.tick();
}

std::vector<LogRecord> of_kind(const std::vector<LogRecord>& rs, RecordKind k) {
  std::vector<LogRecord> out;
  for (const auto& r : rs)
    if (r.kind == k) out.push_back(r);
  return out;
}

std::string to_ndjson(const std::vector<LogRecord>& rs) {
  std::string s;
  for (const auto& r : rs) s += to_json(r).dump() + "\n";
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("surrogate_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("log records round-trip through JSON") {
  Session s = make_session();
  for (const LogRecord& r : {LogRecord{Micros{1234}, RecordKind::joints, "s1", joints_data(s.world())},
                             LogRecord{Micros{5}, RecordKind::frame, "s1", frame_data(s.world())},
                             LogRecord{Micros{0}, RecordKind::header, "s1", header_data(s)}}) {
    const LogRecord back = record_from_json(nlohmann::json::parse(to_json(r).dump()));
    CHECK(back.t == r.t);
    CHECK(back.kind == r.kind);
    CHECK(back.session == r.session);
    CHECK(back.data == r.data);
  }
  CHECK_THROWS_AS(record_from_json(nlohmann::json{{"t", 1}, {"kind", "bogus"}, {"session", ""}, {"data", {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(record_from_json(nlohmann::json{{"t", 1.5}, {"kind", "joints"}, {"session", ""}, {"data", {}}}),
                  std::invalid_argument);
}

TEST_CASE("idle minute: 4 Hz joints, 0.25 Hz frames, cadence within one tick") {
  Session s = make_session();
  MemorySink sink;
  Recorder rec("idle", sink);
  RecordedSession rs(s, rec);
  idle(rs, 60.0);
  const auto joints = of_kind(sink.records, RecordKind::joints);
  const auto frames = of_kind(sink.records, RecordKind::frame);
  CHECK(std::abs(static_cast<int>(joints.size()) - 240) <= 2);
  CHECK(std::abs(static_cast<int>(frames.size()) - 15) <= 1);
  CHECK(of_kind(sink.records, RecordKind::diagnostics).size() == 60);
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const Micros ideal = Micros{250'000} * static_cast<long>(i + 1);
    CHECK(joints[i].t >= ideal);
    CHECK(joints[i].t - ideal < test::kTick);
  }
  CHECK(frames.front().data["width"] == 960);
  CHECK(frames.front().data["height"] == 540);
}

TEST_CASE("command burst is logged in order, each before its goal transitions") {
  Session s = make_session();
  MemorySink sink;
  Recorder rec("burst", sink);
  RecordedSession rs(s, rec);
  for (int i = 0; i < 50; ++i) {
    rs.issue(SpineCmd{(i % 10) / 10.0}, "c1", static_cast<std::uint64_t>(i + 1));
    if (i % 7 == 0) rs.tick();
  }
  idle(rs, 10.0);
  const auto commands = of_kind(sink.records, RecordKind::command);
  REQUIRE(commands.size() == 50);
  for (int i = 0; i < 50; ++i) CHECK(commands[i].data["seq"] == i + 1);

  Micros last{0};
  std::map<std::uint64_t, std::size_t> issued_at;
  std::size_t command_index = 0;
  for (std::size_t i = 0; i < sink.records.size(); ++i) {
    const auto& r = sink.records[i];
    CHECK(r.t >= last);
    last = r.t;
    if (r.kind == RecordKind::command) command_index = i;
    if (r.kind == RecordKind::goal && r.data["state"] == "active") {
      CHECK(sink.records[command_index].t == r.t);  // issuing command is the latest command record
      issued_at[r.data["goal"].get<std::uint64_t>()] = i;
    }
    if (r.kind == RecordKind::goal && r.data["state"] != "active") {
      CHECK(issued_at.count(r.data["goal"].get<std::uint64_t>()) == 1);
    }
  }
}

TEST_CASE("ten minute idle session cadence") {
  Session s = make_session();
  MemorySink sink;
  Recorder rec("long", sink);
  RecordedSession rs(s, rec);
  idle(rs, 600.0);
  CHECK(std::abs(static_cast<int>(of_kind(sink.records, RecordKind::joints).size()) - 2400) <= 3);
  CHECK(std::abs(static_cast<int>(of_kind(sink.records, RecordKind::frame).size()) - 150) <= 1);
}

TEST_CASE("file sink writes a parseable log") {
  const auto path = temp_path("log.ndjson");
  {
    Session s = make_session();
    FileSink sink(path);
    Recorder rec("file", sink);
    RecordedSession rs(s, rec);
    rs.issue(SpineCmd{1.0});
    idle(rs, 5.0);
    sink.flush();
    CHECK(sink.healthy());
    const Timeline mid = read_log(path);  // flushed data is on disk while the sink is open
    CHECK(mid.count(RecordKind::joints) == 20);
  }
  const Timeline tl = read_log(path);
  REQUIRE(tl.header);
  CHECK(tl.header->session == "file");
  CHECK(tl.count(RecordKind::command) == 1);
  CHECK(tl.count(RecordKind::joints) == 20);
  CHECK(tl.skipped.empty());
  std::filesystem::remove(path);
}

TEST_CASE("file sink storage failure keeps the session running") {
  FileSink sink("/nonexistent-dir/for/sure/log.ndjson");
  Session s = make_session();
  Recorder rec("broken", sink);
  RecordedSession rs(s, rec);
  idle(rs, 2.0);
  sink.flush();
  CHECK_FALSE(sink.healthy());
  CHECK(sink.dropped() > 0);
  CHECK(s.now() == Micros{2'000'000});
}

TEST_CASE("reading logs: empty, truncated, out of order") {
  std::istringstream empty("");
  const Timeline e = read_log(empty);
  CHECK_FALSE(e.header);
  CHECK(e.records.empty());

  Session s = make_session();
  MemorySink sink;
  Recorder rec("t", sink);
  RecordedSession rs(s, rec);
  idle(rs, 2.0);
  std::string text = to_ndjson(sink.records);
  const std::size_t lines = sink.records.size();
  text.resize(text.size() - 20);  // cut the final record short

  std::istringstream skip_in(text);
  const Timeline tl = read_log(skip_in, ReplayMode::skip);
  REQUIRE(tl.skipped.size() == 1);
  CHECK(tl.skipped[0].line == lines);
  CHECK(tl.records.size() == lines - 2);  // header and the truncated record are not records

  std::istringstream strict_in(text);
  try {
    read_log(strict_in, ReplayMode::strict);
    FAIL("strict mode accepted a truncated record");
  } catch (const LogFormatError& err) {
    CHECK(err.line() == lines);
  }

  auto records = sink.records;
  std::swap(records[3], records[6]);
  records[3].t = Micros{900'000};
  std::istringstream backwards(to_ndjson(records));
  const Timeline b = read_log(backwards, ReplayMode::skip);
  CHECK_FALSE(b.skipped.empty());
  CHECK(b.skipped[0].message.find("backwards") != std::string::npos);
}

TEST_CASE("resimulating a log reproduces the final state") {
  Session s = make_session();
  MemorySink sink;
  Recorder rec("replay", sink);
  RecordedSession rs(s, rec);
  rs.issue(SpineCmd{0.7});
  idle(rs, 0.5);
  rs.issue(HandVerticalCmd{Side::right, true, StepSize::S});
  rs.issue(LookCmd{{700.0, 600.0}});
  idle(rs, 1.3);
  rs.issue(HandRotateCmd{Side::left, RotateArrow::roll_pos, StepSize::M});
  rs.issue(GripperCmd{Side::right, 0.3});
  rs.issue(TurnCmd{TurnDirection::left, true});
  idle(rs, 0.2);
  rs.issue(TurnCmd{TurnDirection::left, true});
  idle(rs, 6.0);
  rs.admin(RunStopCmd{true});
  idle(rs, 0.5);

  std::istringstream in(to_ndjson(sink.records));
  const Timeline tl = read_log(in);
  auto replayed = resimulate(tl, s.now());
  CHECK(replayed->now() == s.now());
  CHECK(replayed->world().joints() == s.world().joints());
  CHECK(replayed->world().base() == s.world().base());
  CHECK(replayed->world().diagnostics().run_stop);
  CHECK(s.world().base().heading != 0.0);
}

TEST_CASE("rollup: whole-session task, nested subtasks, errors") {
  Session s = make_session();
  MemorySink sink;
  Recorder rec("roll", sink);
  RecordedSession rs(s, rec);
  for (int i = 0; i < 10; ++i) {
    rs.issue(i < 4 ? Command{LookCmd{{900.0, 500.0}}} : Command{HandVerticalCmd{Side::right, i % 2 == 0, StepSize::XS}});
    idle(rs, 1.0);
  }
  std::istringstream in(to_ndjson(sink.records));
  const Timeline tl = read_log(in);
  const double length = std::chrono::duration<double>(tl.duration()).count();

  std::istringstream whole("1 0 " + std::to_string(length) + " everything\n");
  Rollup r = rollup(tl, parse_labels(whole));
  CHECK(r.tasks.at(0).duration == doctest::Approx(r.session_length));
  CHECK(r.tasks.at(0).stats.commands == 10);

  std::istringstream split(
      "# level start end name\n"
      "1 0 9.5 eat yogurt\n"
      "2 0 3.9 scoop yogurt\n"
      "2 4.1 9.5 bring to mouth\n");
  r = rollup(tl, parse_labels(split));
  REQUIRE(r.tasks.size() == 3);
  CHECK(r.tasks[1].parent == "eat yogurt");
  CHECK(r.tasks[0].children_duration <= r.tasks[0].duration);
  CHECK(r.tasks[0].children_duration == doctest::Approx(r.tasks[0].duration - 0.2));  // the labelling gap
  CHECK(r.tasks[1].stats.by_mode.at("looking") == 4);
  CHECK(r.tasks[2].stats.by_mode.at("hand_right") == 5);  // the one at 4.0 s falls in the gap

  std::istringstream overlap("1 0 5 a\n1 4 8 b\n");
  try {
    rollup(tl, parse_labels(overlap));
    FAIL("overlap accepted");
  } catch (const LabelError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream orphan("1 0 5 a\n2 4 8 b\n");
  CHECK_THROWS_AS(rollup(tl, parse_labels(orphan)), LabelError);

  std::istringstream none("");
  r = rollup(tl, parse_labels(none));
  CHECK(r.tasks.empty());
  CHECK(r.overall.commands == 10);
  CHECK(r.overall.by_type.at("look") == 4);
}
