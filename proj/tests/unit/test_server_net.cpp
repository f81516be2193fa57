#include <filesystem>
#include <fstream>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <doctest.h>

#include "protocol_support.hpp"
#include "surrogate/server/ws_server.hpp"

using namespace surrogate;
using nlohmann::json;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

http::response<http::string_body> get(unsigned short port, const std::string& target) {
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  stream.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
  http::request<http::string_body> req(http::verb::get, target, 11);
  req.set(http::field::host, "localhost");
  http::write(stream, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(stream, buf, res);
  return res;
}

struct WsClient {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  void open(unsigned short port, const std::string& token) {
    net::connect(ws.next_layer(), std::vector{tcp::endpoint(net::ip::make_address("127.0.0.1"), port)});
    ws.handshake("localhost", "/ws?token=" + token);
  }
  json read() {
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  void send(const json& j) { ws.write(net::buffer(j.dump())); }
};

}  // namespace

TEST_CASE("real sockets: HTTP assets, token check, command round trip") {
  const auto dir = std::filesystem::temp_directory_path() / ("surrogate_web_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<!doctype html><title>surrogate</title>\n";

  test::Rig rig;
  ServerOptions opts;
  opts.address = "127.0.0.1";
  opts.port = 0;
  opts.static_dir = dir;
  opts.rate = 4.0;  // keep the test short
  WsServer server(rig.core, opts);
  server.start();
  const unsigned short port = server.port();

  const auto robot = get(port, "/robot.json");
  CHECK(robot.result() == http::status::ok);
  CHECK(json::parse(robot.body())["name"] == test::robot().name);
  const auto index = get(port, "/");
  CHECK(index.result() == http::status::ok);
  CHECK(index.body().find("surrogate") != std::string::npos);
  CHECK(get(port, "/missing.js").result() == http::status::not_found);
  CHECK(get(port, "/../etc/passwd").result() == http::status::not_found);

  {
    WsClient bad;
    CHECK_THROWS(bad.open(port, "nope"));
  }

  WsClient c;
  c.open(port, rig.core.options().token);
  const json welcome = c.read();
  CHECK(welcome["type"] == "welcome");
  CHECK(welcome["role"] == "operator");
  CHECK(welcome["seq"] == 1);

  c.send({{"seq", 1}, {"type", "command"}, {"command", {{"type", "spine"}, {"fraction", 0.2}}}});
  bool acked = false, reached = false;
  int states = 0;
  std::uint64_t last_seq = 1;
  for (int i = 0; i < 2000 && !reached; ++i) {
    const json m = c.read();
    CHECK(m["seq"] == ++last_seq);
    if (m["type"] == "ack") acked = m["ack"] == 1 && m.contains("goal");
    if (m["type"] == "state") ++states;
    if (m["type"] == "goal" && m["subsystem"] == "torso" && m["state"] == "reached") reached = true;
  }
  CHECK(acked);
  CHECK(reached);
  CHECK(states > 0);
  CHECK(server.ticks() > 0);
  c.ws.close(websocket::close_code::normal);

  server.stop();
  std::filesystem::remove_all(dir);
}
