#include <httplib.h>

#include <string>

#include "latentpara/errors.hpp"
#include "latentpara/protocol.hpp"

namespace latentpara {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("malformed URL '" + url + "'");
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

class HttpTransport : public Transport {
 public:
  HttpTransport(const std::string& url, int timeout_ms)
      : url_(url), parts_(split_url(url)), timeout_ms_(timeout_ms) {}

  std::string exchange(const std::string& line) override {
    // httplib::Client is not thread-safe; one per request keeps this reentrant.
    httplib::Client client(parts_.origin);
    const auto secs = timeout_ms_ / 1000;
    const auto usecs = (timeout_ms_ % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto res = client.Post(parts_.path, line + "\n", "application/x-ndjson");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
        throw TimeoutError("oracle " + url_ + ": " + httplib::to_string(err));
      }
      throw TransportError("oracle " + url_ + ": " + httplib::to_string(err));
    }
    if (res->status != 200) {
      throw TransportError("oracle " + url_ + ": HTTP status " + std::to_string(res->status));
    }
    std::string body = res->body;
    if (auto nl = body.find('\n'); nl != std::string::npos) body.resize(nl);
    if (!body.empty() && body.back() == '\r') body.pop_back();
    return body;
  }

 private:
  std::string url_;
  ParsedUrl parts_;
  int timeout_ms_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& url, int timeout_ms) {
  return std::make_unique<HttpTransport>(url, timeout_ms);
}

struct HttpOracleServer::Impl {
  std::shared_ptr<const ProtocolHandler> handler;
  httplib::Server server;
};

HttpOracleServer::HttpOracleServer(std::shared_ptr<const ProtocolHandler> handler, std::string path)
    : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  const ProtocolHandler* h = impl_->handler.get();
  impl_->server.Post(path, [h](const httplib::Request& req, httplib::Response& res) {
    std::string out;
    std::size_t start = 0;
    const std::string& body = req.body;
    while (start < body.size()) {
      auto end = body.find('\n', start);
      if (end == std::string::npos) end = body.size();
      std::string_view line(body.data() + start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) {
        out += h->handle_line(line);
        out += '\n';
      }
      start = end + 1;
    }
    res.set_content(out, "application/x-ndjson");
  });
}

HttpOracleServer::~HttpOracleServer() { stop(); }

int HttpOracleServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw TransportError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpOracleServer::run() { impl_->server.listen_after_bind(); }

void HttpOracleServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace latentpara
