#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "surrogate/telemetry/record.hpp"

namespace surrogate {

class Sink {
 public:
  virtual ~Sink() = default;
  virtual void write(const LogRecord& r) = 0;
  virtual void flush() {}
  /// False once the sink has lost records.
  virtual bool healthy() const { return true; }
};

class MemorySink : public Sink {
 public:
  void write(const LogRecord& r) override { records.push_back(r); }
  std::vector<LogRecord> records;
};

/// NDJSON file written by a background thread from a bounded queue. Flushes
/// at least once per `flush_interval` of wall time. A full queue or a storage
/// error never blocks the caller: records are dropped, counted, and reported
/// once on stderr.
class FileSink : public Sink {
 public:
  explicit FileSink(const std::filesystem::path& path, std::size_t capacity = 1 << 16,
                    std::chrono::milliseconds flush_interval = std::chrono::milliseconds(500));
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  void write(const LogRecord& r) override;
  /// Blocks until everything queued so far is on disk (or dropped).
  void flush() override;
  bool healthy() const override { return dropped_ == 0; }
  std::size_t dropped() const { return dropped_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void run();
  void fail(const std::string& why);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t capacity_;
  std::chrono::milliseconds flush_interval_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable drained_;
  std::deque<std::string> queue_;
  std::size_t in_flight_ = 0;
  bool stop_ = false;
  bool broken_ = false;
  std::atomic<std::size_t> dropped_{0};
  std::thread thread_;
};

struct RecorderOptions {
  Micros joints_period{250'000};       // 4 Hz
  Micros frame_period{4'000'000};      // 0.25 Hz
  Micros diagnostics_period{1'000'000};
};

/// Writes a session's records. Samplers run on the sim clock: call sample()
/// once after every tick.
class Recorder {
 public:
  Recorder(std::string session_id, Sink& sink, RecorderOptions options = {});

  void header(const Session& s);
  void command(Micros t, nlohmann::json data);
  void goal(const GoalTransition& g);
  void contact(const ContactEvent& e);
  void sample(const World& w);

  const std::string& session_id() const { return id_; }
  Sink& sink() { return sink_; }

 private:
  void emit(Micros t, RecordKind kind, nlohmann::json data);

  std::string id_;
  Sink& sink_;
  RecorderOptions options_;
  Micros next_joints_{0};
  Micros next_frame_{0};
  Micros next_diagnostics_{0};
};

}  // namespace surrogate
