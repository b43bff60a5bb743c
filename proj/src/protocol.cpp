#include "latentpara/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "latentpara/errors.hpp"

namespace latentpara {

using nlohmann::json;

EndpointSpec EndpointSpec::parse(std::string_view text) {
  EndpointSpec spec;
  if (text == "synthetic" || text.starts_with("synthetic:")) {
    spec.kind = Kind::kSynthetic;
    spec.address = std::string(text.substr(std::min(text.size(), std::string_view("synthetic:").size())));
    return spec;
  }
  if (text.starts_with("cmd:")) {
    spec.kind = Kind::kSubprocess;
    spec.address = std::string(text.substr(4));
    if (spec.address.empty()) throw ConfigError("endpoint 'cmd:' needs a command line");
    return spec;
  }
  if (text.starts_with("http:")) {
    spec.kind = Kind::kHttp;
    // Accept both "http:http://host/path" and a bare "http://host/path".
    std::string_view rest = text.substr(5);
    spec.address = rest.starts_with("//") ? std::string(text) : std::string(rest);
    if (!spec.address.starts_with("http://")) {
      throw ConfigError("endpoint '" + std::string(text) + "': expected http:<http://host:port/path>");
    }
    return spec;
  }
  throw ConfigError("endpoint '" + std::string(text) +
                    "': expected http:<url>, cmd:<command> or synthetic");
}

std::string EndpointSpec::to_string() const {
  switch (kind) {
    case Kind::kHttp:
      return "http:" + address;
    case Kind::kSubprocess:
      return "cmd:" + address;
    case Kind::kSynthetic:
      return address.empty() ? "synthetic" : "synthetic:" + address;
  }
  return {};
}

std::unique_ptr<Transport> make_transport(const EndpointSpec& endpoint) {
  if (endpoint.timeout_ms <= 0) throw ConfigError("oracle timeout must be positive");
  switch (endpoint.kind) {
    case EndpointSpec::Kind::kHttp:
      return make_http_transport(endpoint.address, endpoint.timeout_ms);
    case EndpointSpec::Kind::kSubprocess:
      return make_subprocess_transport(endpoint.address, endpoint.timeout_ms);
    case EndpointSpec::Kind::kSynthetic:
      break;
  }
  throw ConfigError("synthetic endpoints have no wire transport");
}

// ---------------------------------------------------------------------------
// Server side

namespace {

struct RequestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::string& required_string(const json& request, const char* field) {
  auto it = request.find(field);
  if (it == request.end() || !it->is_string()) {
    throw RequestError(std::string("bad_request: missing string field '") + field + "'");
  }
  return it->get_ref<const std::string&>();
}

const std::string& required_text(const json& request, const char* field) {
  const std::string& s = required_string(request, field);
  if (s.empty()) throw RequestError(std::string("bad_request: empty '") + field + "'");
  return s;
}

std::vector<double> required_vector(const json& request, const char* field) {
  auto it = request.find(field);
  if (it == request.end() || !it->is_array()) {
    throw RequestError(std::string("bad_request: missing array field '") + field + "'");
  }
  std::vector<double> v;
  v.reserve(it->size());
  for (const auto& x : *it) {
    if (!x.is_number()) throw RequestError(std::string("bad_request: non-numeric '") + field + "'");
    v.push_back(x.get<double>());
  }
  return v;
}

template <typename T>
T& require_oracle(const std::shared_ptr<T>& p, std::string_view op) {
  if (!p) throw RequestError("unsupported_op: this server does not provide '" + std::string(op) + "'");
  return *p;
}

json error_response(const json& id, const std::string& message) {
  return json{{"id", id}, {"ok", false}, {"error", message}};
}

}  // namespace

void ProtocolHandler::register_sample(QuerySample sample) {
  std::string id = sample.sample_id;
  samples_.insert_or_assign(std::move(id), std::move(sample));
}

json ProtocolHandler::handle(const json& request) const {
  if (!request.is_object()) return error_response(nullptr, "bad_request: request must be an object");
  const json id = request.contains("id") ? request["id"] : json(nullptr);
  try {
    if (!id.is_string()) throw RequestError("bad_request: missing string field 'id'");
    const std::string& op = required_string(request, "op");
    json response{{"id", id}, {"ok", true}};
    if (op == "ping") {
      // health check only
    } else if (op == "encode") {
      auto& ae = require_oracle(autoencoder, op);
      response["embedding"] = ae.encode(required_text(request, "text")).values();
    } else if (op == "decode") {
      auto& ae = require_oracle(autoencoder, op);
      std::vector<double> z = required_vector(request, "embedding");
      for (double x : z) {
        if (!std::isfinite(x)) throw RequestError("bad_request: non-finite embedding");
      }
      response["text"] = ae.decode(LatentVector(std::move(z)));
    } else if (op == "segment") {
      auto& seg = require_oracle(segmenter, op);
      const std::string& sample_id = required_string(request, "sample_id");
      auto it = samples_.find(sample_id);
      if (it == samples_.end()) throw RequestError("unknown_sample: '" + sample_id + "'");
      const auto result = seg.segment(it->second, required_text(request, "text"));
      if (const double* iou = std::get_if<double>(&result)) {
        response["iou"] = *iou;
      } else {
        response["mask"] = mask_to_json(std::get<BinaryMask>(result));
      }
    } else if (op == "embed") {
      auto& emb = require_oracle(embedder, op);
      response["embedding"] = emb.embed(required_text(request, "text"));
    } else if (op == "judge") {
      auto& j = require_oracle(judge, op);
      response["score"] = j.score(required_text(request, "original"), required_text(request, "text"));
    } else {
      throw RequestError("unsupported_op: '" + op + "'");
    }
    return response;
  } catch (const RequestError& e) {
    return error_response(id, e.what());
  } catch (const std::exception& e) {
    return error_response(id, std::string("internal: ") + e.what());
  }
}

std::string ProtocolHandler::handle_line(std::string_view line) const {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error& e) {
    return error_response(nullptr, std::string("bad_request: malformed JSON: ") + e.what()).dump();
  }
  return handle(request).dump();
}

void serve_stdio(const ProtocolHandler& handler, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << handler.handle_line(line) << '\n';
    out.flush();
  }
}

// ---------------------------------------------------------------------------
// Client side

ProtocolClient::ProtocolClient(std::unique_ptr<Transport> transport, int max_concurrency)
    : transport_(std::move(transport)), slots_(std::max(1, max_concurrency)) {
  if (!transport_) throw std::invalid_argument("ProtocolClient: null transport");
}

json ProtocolClient::call(std::string_view op, json payload) {
  if (!payload.is_object()) throw std::invalid_argument("ProtocolClient::call: payload must be an object");
  const std::string id = "r" + std::to_string(++counter_);
  payload["op"] = op;
  payload["id"] = id;

  std::string reply;
  slots_.acquire();
  try {
    reply = transport_->exchange(payload.dump());
  } catch (...) {
    slots_.release();
    throw;
  }
  slots_.release();

  json response;
  try {
    response = json::parse(reply);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string(op) + ": unparseable response: " + e.what());
  }
  if (!response.is_object()) throw ProtocolError(std::string(op) + ": response is not an object");
  if (!response.contains("id") || response["id"] != id) {
    throw ProtocolError(std::string(op) + ": response id does not echo request id " + id);
  }
  auto ok = response.find("ok");
  if (ok == response.end() || !ok->is_boolean()) {
    throw ProtocolError(std::string(op) + ": response lacks boolean 'ok'");
  }
  if (!ok->get<bool>()) {
    const std::string message = response.value("error", std::string("unspecified error"));
    if (message.starts_with("unknown_sample")) throw UnknownSampleError(message);
    throw RemoteError(std::string(op) + ": " + message);
  }
  return response;
}

int parse_judge_score(const json& value) {
  if (!value.is_number_integer()) {
    throw ProtocolError("judge: score must be an integer, got " + value.dump());
  }
  const auto score = value.get<long long>();
  if (score < 1 || score > 5) {
    throw ProtocolError("judge: score " + std::to_string(score) + " outside 1..5");
  }
  return static_cast<int>(score);
}

}  // namespace latentpara
