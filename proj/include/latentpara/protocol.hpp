#pragma once

// Newline-delimited JSON oracle protocol.
//
// Request:  {"op": "ping"|"encode"|"decode"|"segment"|"embed"|"judge",
//            "id": "<string>", ...payload}
// Response: {"id": "<echoed>", "ok": true, ...payload}
//        or {"id": "<echoed or null>", "ok": false, "error": "<code>: <message>"}
//
// Payload fields:
//   encode   text          -> embedding
//   decode   embedding     -> text
//   segment  sample_id, image_ref, text -> iou | mask {w, h, rle}
//   embed    text          -> embedding
//   judge    original, text -> score (integer 1..5)
//
// The same lines travel over subprocess stdio or as HTTP POST bodies.

#include <atomic>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <semaphore>
#include <string>
#include <string_view>

#include <json.hpp>

#include "latentpara/oracles.hpp"

namespace latentpara {

/// Where an oracle lives: "http:<url>", "cmd:<command line>" or "synthetic".
struct EndpointSpec {
  enum class Kind { kHttp, kSubprocess, kSynthetic };

  Kind kind = Kind::kSynthetic;
  std::string address;
  int timeout_ms = 30000;
  int max_concurrency = 4;

  /// Throws ConfigError on an unknown scheme.
  static EndpointSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Carries one request line and returns one response line (no newlines).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string exchange(const std::string& line) = 0;
};

/// Spawn `/bin/sh -c command` and speak NDJSON over its stdin/stdout.
/// Requests are serialized; each read waits at most timeout_ms.
std::unique_ptr<Transport> make_subprocess_transport(const std::string& command, int timeout_ms);

/// POST each line to `url` (http://host[:port][/path]).
std::unique_ptr<Transport> make_http_transport(const std::string& url, int timeout_ms);

std::unique_ptr<Transport> make_transport(const EndpointSpec& endpoint);

/// Server side: dispatches requests to whichever oracles are installed.
class ProtocolHandler {
 public:
  std::shared_ptr<Autoencoder> autoencoder;
  std::shared_ptr<Segmenter> segmenter;
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<Judge> judge;

  void register_sample(QuerySample sample);

  /// Never throws for bad input; failures become {"ok": false} responses.
  nlohmann::json handle(const nlohmann::json& request) const;
  std::string handle_line(std::string_view line) const;

 private:
  std::map<std::string, QuerySample> samples_;
};

/// In-process transport straight into a handler.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(std::shared_ptr<const ProtocolHandler> handler)
      : handler_(std::move(handler)) {}
  std::string exchange(const std::string& line) override { return handler_->handle_line(line); }

 private:
  std::shared_ptr<const ProtocolHandler> handler_;
};

/// Answer one response line per request line until EOF.
void serve_stdio(const ProtocolHandler& handler, std::istream& in, std::ostream& out);

/// HTTP front end for a handler. Each POST body is a batch of request lines;
/// the response body carries one response line per request line.
class HttpOracleServer {
 public:
  explicit HttpOracleServer(std::shared_ptr<const ProtocolHandler> handler,
                            std::string path = "/");
  ~HttpOracleServer();
  HttpOracleServer(const HttpOracleServer&) = delete;
  HttpOracleServer& operator=(const HttpOracleServer&) = delete;

  /// Bind to host:port (port 0 picks a free port); returns the bound port.
  int bind(const std::string& host, int port);
  /// Serve until stop(). Blocks.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Client side: request ids, id echo checks, error mapping and a bound on
/// in-flight requests.
class ProtocolClient {
 public:
  ProtocolClient(std::unique_ptr<Transport> transport, int max_concurrency);

  /// Send {"op": op, "id": ..., payload...}; returns the response object on
  /// ok == true. Throws RemoteError / UnknownSampleError on ok == false and
  /// ProtocolError on malformed responses.
  nlohmann::json call(std::string_view op, nlohmann::json payload = nlohmann::json::object());

  void ping() { call("ping"); }

  std::uint64_t requests_sent() const { return counter_.load(); }

 private:
  std::unique_ptr<Transport> transport_;
  std::counting_semaphore<> slots_;
  std::atomic<std::uint64_t> counter_{0};
};

class RemoteAutoencoder : public Autoencoder {
 public:
  explicit RemoteAutoencoder(std::shared_ptr<ProtocolClient> client) : client_(std::move(client)) {}
  LatentVector encode(const std::string& text) override;
  std::string decode(const LatentVector& z) override;

  /// Embedding size learned from the first encode response; 0 before that.
  std::size_t dim() const { return dim_.load(); }

 private:
  std::shared_ptr<ProtocolClient> client_;
  std::atomic<std::size_t> dim_{0};
};

class RemoteSegmenter : public Segmenter {
 public:
  explicit RemoteSegmenter(std::shared_ptr<ProtocolClient> client) : client_(std::move(client)) {}
  SegmentationResult segment(const QuerySample& sample, const std::string& query) override;

 private:
  std::shared_ptr<ProtocolClient> client_;
};

class RemoteEmbedder : public Embedder {
 public:
  explicit RemoteEmbedder(std::shared_ptr<ProtocolClient> client) : client_(std::move(client)) {}
  std::vector<double> embed(const std::string& text) override;

 private:
  std::shared_ptr<ProtocolClient> client_;
};

class RemoteJudge : public Judge {
 public:
  explicit RemoteJudge(std::shared_ptr<ProtocolClient> client) : client_(std::move(client)) {}
  int score(const std::string& original, const std::string& paraphrase) override;

 private:
  std::shared_ptr<ProtocolClient> client_;
};

/// Parse a judge score; anything but an integer in 1..5 is a ProtocolError.
int parse_judge_score(const nlohmann::json& value);

}  // namespace latentpara
