#include "surrogate/telemetry/recorder.hpp"

#include <iostream>

namespace surrogate {

FileSink::FileSink(const std::filesystem::path& path, std::size_t capacity, std::chrono::milliseconds flush_interval)
    : path_(path), out_(path, std::ios::out | std::ios::trunc), capacity_(capacity), flush_interval_(flush_interval) {
  if (!out_) fail("cannot open " + path.string());
  thread_ = std::thread([this] { run(); });
}

FileSink::~FileSink() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  thread_.join();
}

void FileSink::fail(const std::string& why) {
  if (!broken_) std::cerr << "telemetry: log " << path_.string() << " failing, records will be dropped: " << why << '\n';
  broken_ = true;
}

void FileSink::write(const LogRecord& r) {
  std::string line = to_json(r).dump();
  {
    std::lock_guard lock(mutex_);
    if (broken_ || queue_.size() >= capacity_) {
      if (!broken_) fail("queue full");
      ++dropped_;
      return;
    }
    queue_.push_back(std::move(line));
  }
  wake_.notify_one();
}

void FileSink::flush() {
  std::unique_lock lock(mutex_);
  wake_.notify_one();
  drained_.wait(lock, [this] { return queue_.empty() && in_flight_ == 0; });
}

void FileSink::run() {
  std::unique_lock lock(mutex_);
  auto last_flush = std::chrono::steady_clock::now();
  while (true) {
    wake_.wait_for(lock, flush_interval_, [this] { return stop_ || !queue_.empty(); });
    std::deque<std::string> batch;
    batch.swap(queue_);
    in_flight_ = batch.size();
    const bool stopping = stop_;
    lock.unlock();

    bool ok = true;
    for (const auto& line : batch) out_ << line << '\n';
    const auto now = std::chrono::steady_clock::now();
    if (batch.empty() || stopping || now - last_flush >= flush_interval_) {
      out_.flush();
      last_flush = now;
    }
    ok = static_cast<bool>(out_);

    lock.lock();
    if (!ok && !batch.empty()) {
      dropped_ += batch.size();
      fail("write error");
    }
    in_flight_ = 0;
    if (queue_.empty()) {
      out_.flush();
      drained_.notify_all();
    }
    if (stopping && queue_.empty()) break;
  }
}

Recorder::Recorder(std::string session_id, Sink& sink, RecorderOptions options)
    : id_(std::move(session_id)), sink_(sink), options_(options) {}

void Recorder::emit(Micros t, RecordKind kind, nlohmann::json data) {
  sink_.write(LogRecord{t, kind, id_, std::move(data)});
}

void Recorder::header(const Session& s) {
  const Micros now = s.now();
  emit(now, RecordKind::header, header_data(s));
  next_joints_ = now + options_.joints_period;
  next_frame_ = now + options_.frame_period;
  next_diagnostics_ = now + options_.diagnostics_period;
}

void Recorder::command(Micros t, nlohmann::json data) { emit(t, RecordKind::command, std::move(data)); }

void Recorder::goal(const GoalTransition& g) { emit(g.t, RecordKind::goal, goal_data(g)); }

void Recorder::contact(const ContactEvent& e) { emit(e.t, RecordKind::contact, contact_data(e)); }

void Recorder::sample(const World& w) {
  const Micros now = w.now();
  // Deadlines advance by whole periods so the cadence never drifts.
  const auto due = [now](Micros& next, Micros period) {
    if (now < next) return false;
    next += period * ((now - next) / period + 1);
    return true;
  };
  if (due(next_joints_, options_.joints_period)) emit(now, RecordKind::joints, joints_data(w));
  if (due(next_frame_, options_.frame_period)) emit(now, RecordKind::frame, frame_data(w));
  if (due(next_diagnostics_, options_.diagnostics_period)) emit(now, RecordKind::diagnostics, diagnostics_data(w));
}

}  // namespace surrogate
