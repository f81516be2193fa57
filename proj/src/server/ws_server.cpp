#include "surrogate/server/ws_server.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

namespace surrogate {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i] == '+' ? ' ' : s[i];
    }
  }
  return out;
}

std::string query_param(std::string_view target, std::string_view key) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return {};
  std::istringstream in{std::string(target.substr(q + 1))};
  for (std::string kv; std::getline(in, kv, '&');) {
    const auto eq = kv.find('=');
    if (kv.substr(0, eq) == key) return eq == std::string::npos ? "" : url_decode(kv.substr(eq + 1));
  }
  return {};
}

std::string_view mime_type(const std::filesystem::path& p) {
  static const std::unordered_map<std::string, std::string_view> types = {
      {".html", "text/html"}, {".js", "application/javascript"}, {".mjs", "application/javascript"},
      {".css", "text/css"},   {".json", "application/json"},     {".png", "image/png"},
      {".svg", "image/svg+xml"}, {".wasm", "application/wasm"},  {".map", "application/json"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

}  // namespace

class WsSession;

struct WsServer::Impl {
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::unordered_map<ClientId, std::weak_ptr<WsSession>> sessions;  // io thread only
  std::thread io_thread;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, TeleopCore& core, ClientId id, WsServer::Impl& impl)
      : ws_(std::move(socket)), core_(core), id_(id), impl_(impl) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close();
      self->impl_.sessions[self->id_] = self;
      self->read();
      self->flush();
    });
  }

  // Drains only when the socket is idle, so a slow client leaves snapshots in
  // the core's latest-wins slots instead of piling them up here.
  void flush() {
    if (writing_) return;
    for (auto& m : core_.drain(id_)) queue_.push_back(std::move(m));
    write_next();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->core_.receive(self->id_, beast::buffers_to_string(self->buffer_.data()));
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write_next() {
    if (queue_.empty())
      for (auto& m : core_.drain(id_)) queue_.push_back(std::move(m));
    if (queue_.empty()) {
      if (core_.closed(id_) && !closing_) {
        closing_ = true;
        ws_.async_close(websocket::close_code::going_away,
                        [self = shared_from_this()](beast::error_code) { self->close(); });
      }
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) return self->close();
      self->queue_.pop_front();
      self->write_next();
    });
  }

  void close() {
    if (gone_) return;
    gone_ = true;
    core_.disconnect(id_);
    impl_.sessions.erase(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  TeleopCore& core_;
  ClientId id_;
  WsServer::Impl& impl_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool writing_ = false, closing_ = false, gone_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, TeleopCore& core, const ServerOptions& options, WsServer::Impl& impl)
      : stream_(std::move(socket)), core_(core), options_(options), impl_(impl) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->handle();
    });
  }

 private:
  void handle() {
    const std::string target(req_.target());
    const std::string path = target.substr(0, target.find('?'));
    if (websocket::is_upgrade(req_)) {
      if (path != "/ws") return respond(http::status::not_found, "text/plain", "no such endpoint\n");
      const auto id = core_.connect(query_param(target, "token"));
      if (!id) return respond(http::status::forbidden, "text/plain", "bad token\n");
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), core_, *id, impl_)->run(std::move(req_));
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head)
      return respond(http::status::bad_request, "text/plain", "GET only\n");
    if (path == "/robot.json") return respond(http::status::ok, "application/json", core_.session().world().robot().source);
    if (options_.static_dir.empty() || path.find("..") != std::string::npos)
      return respond(http::status::not_found, "text/plain", "not found\n");
    std::filesystem::path file = options_.static_dir / (path == "/" ? "index.html" : path.substr(1));
    std::ifstream in(file, std::ios::binary);
    if (!in) return respond(http::status::not_found, "text/plain", "not found\n");
    std::ostringstream body;
    body << in.rdbuf();
    respond(http::status::ok, mime_type(file), body.str());
  }

  void respond(http::status status, std::string_view type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "surrogate");
    res->set(http::field::content_type, beast::string_view(type.data(), type.size()));
    res->keep_alive(false);
    res->body() = req_.method() == http::verb::head ? "" : std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  beast::tcp_stream stream_;
  TeleopCore& core_;
  const ServerOptions& options_;
  WsServer::Impl& impl_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

namespace {

void accept_loop(WsServer::Impl& impl, TeleopCore& core, const ServerOptions& options) {
  impl.acceptor.async_accept([&impl, &core, &options](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), core, options, impl)->run();
    accept_loop(impl, core, options);
  });
}

}  // namespace

WsServer::WsServer(TeleopCore& core, ServerOptions options)
    : core_(core), options_(std::move(options)), impl_(std::make_unique<Impl>()) {}

WsServer::~WsServer() { stop(); }

void WsServer::start() {
  const tcp::endpoint ep(net::ip::make_address(options_.address), options_.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  core_.set_output_callback([this](ClientId id) {
    net::post(impl_->ioc, [this, id] {
      auto it = impl_->sessions.find(id);
      if (it == impl_->sessions.end()) return;
      if (auto s = it->second.lock()) s->flush();
    });
  });
  accept_loop(*impl_, core_, options_);
  running_ = true;
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
  sim_thread_ = std::thread([this] { sim_loop(); });
}

void WsServer::stop() {
  if (!running_.exchange(false)) return;
  if (sim_thread_.joinable()) sim_thread_.join();
  core_.set_output_callback({});
  impl_->ioc.stop();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
}

unsigned short WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::sim_loop() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(core_.session().tick_length() / options_.rate);
  auto next = clock::now();
  while (running_) {
    core_.step();
    ++ticks_;
    next += period;
    const auto now = clock::now();
    if (now - next > std::chrono::seconds(1)) next = now;  // fell far behind: do not burst to catch up
    std::this_thread::sleep_until(next);
  }
}

}  // namespace surrogate
