#include "surrogate/server/loopback.hpp"

namespace surrogate {

LoopbackLink::LoopbackLink(TeleopCore& core, std::string_view token, LinkOptions options)
    : core_(core), options_(options), id_(core.connect(token)), rng_(options.seed) {}

LoopbackLink::~LoopbackLink() {
  if (id_) core_.disconnect(*id_);
}

Micros LoopbackLink::delivery_time(Micros& last) {
  Micros extra{0};
  if (options_.jitter.count() > 0)
    extra = Micros(std::uniform_int_distribution<std::int64_t>(0, options_.jitter.count())(rng_));
  last = std::max(last, core_.session().now() + options_.latency + extra);
  return last;
}

void LoopbackLink::send(std::string text) {
  if (!id_) return;
  up_.push_back({delivery_time(last_up_), std::move(text)});
}

void LoopbackLink::pump_uplink() {
  const Micros now = core_.session().now();
  while (!up_.empty() && up_.front().due <= now) {
    core_.receive(*id_, std::move(up_.front().text));
    up_.pop_front();
  }
}

void LoopbackLink::pump_downlink() {
  if (!id_) return;
  for (auto& text : core_.drain(*id_)) down_.push_back({delivery_time(last_down_), std::move(text)});
}

std::vector<nlohmann::json> LoopbackLink::poll() {
  std::vector<nlohmann::json> out;
  const Micros now = core_.session().now();
  while (!down_.empty() && down_.front().due <= now) {
    out.push_back(nlohmann::json::parse(down_.front().text));
    down_.pop_front();
  }
  return out;
}

}  // namespace surrogate
