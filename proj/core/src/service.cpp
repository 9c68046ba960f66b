#include "oocheck/service.hpp"

#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace oocheck {

namespace {

std::optional<std::string> base64_decode(const std::string& input) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  int buffer = 0, bits = 0;
  for (char c : input) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    int v = value_of(c);
    if (v < 0) return std::nullopt;
    buffer = (buffer << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

json error_body(std::string_view code, const std::string& message,
                const std::string& field = "") {
  json err;
  err["code"] = std::string(code);
  err["message"] = message;
  if (!field.empty()) err["field"] = field;
  json body;
  body["error"] = std::move(err);
  return body;
}

bool probe_rest_endpoint(const std::string& base_url, int timeout_seconds) {
  httplib::Client client(base_url);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  bump_network_ops();
  auto res = client.Get("/");
  return static_cast<bool>(res);  // any HTTP response means reachable
}

}  // namespace

struct VerificationService::Impl {
  httplib::Server server;
};

VerificationService::VerificationService(std::shared_ptr<Pipeline> pipeline)
    : pipeline_(std::move(pipeline)), impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;

  server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    json body;
    body["status"] = "ok";
    auto stats = pipeline_->cache().stats();
    body["cache"] = {{"entries", stats.entries}, {"bytes", stats.bytes}};
    auto providers = json::array();
    for (const auto& [role, spec] : pipeline_->config().providers) {
      json p;
      p["role"] = role;
      p["id"] = spec.id;
      p["kind"] = spec.kind;
      bool reachable = true;
      if (spec.kind == "rest") {
        reachable = !pipeline_->config().offline &&
                    probe_rest_endpoint(spec.endpoint, spec.timeout_seconds);
      } else {
        reachable = fs::exists(spec.path);
      }
      p["reachable"] = reachable;
      providers.push_back(std::move(p));
    }
    body["providers"] = std::move(providers);
    res.set_content(body.dump(2), "application/json");
  });

  server.Post("/verify", [this](const httplib::Request& req, httplib::Response& res) {
    auto reply_error = [&](int status, std::string_view code, const std::string& message,
                           const std::string& field = "") {
      res.status = status;
      res.set_content(error_body(code, message, field).dump(2), "application/json");
    };

    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      reply_error(400, "EBadRequest", std::string("request body is not JSON: ") + e.what());
      return;
    }
    if (!body.is_object()) {
      reply_error(400, "EBadRequest", "request body must be a JSON object");
      return;
    }
    if (!body.contains("caption") || !body["caption"].is_string() ||
        body["caption"].get<std::string>().empty()) {
      reply_error(400, "EBadRequest", "missing or empty field", "caption");
      return;
    }
    int image_fields = static_cast<int>(body.contains("image_path")) +
                       static_cast<int>(body.contains("image_uri")) +
                       static_cast<int>(body.contains("image_b64"));
    if (image_fields != 1) {
      reply_error(400, "EBadRequest",
                  "provide exactly one of image_path, image_uri, image_b64", "image");
      return;
    }

    std::string caption = body["caption"].get<std::string>();
    std::string image_ref;
    std::optional<std::string> image_bytes;
    if (body.contains("image_b64")) {
      if (!body["image_b64"].is_string()) {
        reply_error(400, "EBadRequest", "image_b64 must be a string", "image_b64");
        return;
      }
      auto decoded = base64_decode(body["image_b64"].get<std::string>());
      if (!decoded || decoded->empty()) {
        reply_error(400, "EBadRequest", "image_b64 is not valid base64", "image_b64");
        return;
      }
      image_bytes = std::move(*decoded);
      image_ref = "inline:" + sha256_hex(*image_bytes);
    } else {
      const char* field = body.contains("image_path") ? "image_path" : "image_uri";
      if (!body[field].is_string() || body[field].get<std::string>().empty()) {
        reply_error(400, "EBadRequest", "must be a non-empty string", field);
        return;
      }
      image_ref = body[field].get<std::string>();
    }

    ClaimPair claim;
    claim.caption = std::move(caption);
    claim.image_ref = image_ref;

    try {
      std::string resolved_bytes;
      if (image_bytes) {
        resolved_bytes = *image_bytes;
      } else {
        ImageResolver resolver(pipeline_->cache(), pipeline_->config().offline);
        resolved_bytes = resolver.resolve(image_ref);
      }
      std::string trace_id =
          sha256_hex(sha256_hex(resolved_bytes) + "|" + claim.caption + "|" +
                     pipeline_->fingerprint())
              .substr(0, 16);
      claim.id = "req-" + trace_id;

      VerificationOutcome outcome = pipeline_->verify(claim, resolved_bytes);

      fs::path trace_dir(pipeline_->config().trace_dir);
      std::error_code ec;
      fs::create_directories(trace_dir, ec);
      fs::path trace_path = trace_dir / (trace_id + ".json");
      {
        std::string trace = pipeline_->serialize_trace(outcome);
        std::ofstream out(trace_path, std::ios::binary | std::ios::trunc);
        out.write(trace.data(), static_cast<std::streamsize>(trace.size()));
      }

      if (!outcome.verdict()) {
        Errc code = outcome.reasoning.error_code.value_or(Errc::ParseFailure);
        int status = code == Errc::ProviderUnavailable ? 503 : 500;
        reply_error(status, errc_name(code),
                    outcome.reasoning.trace.error.value_or("reasoning failed"));
        return;
      }

      json reply;
      json verdict;
      verdict["label"] = std::string(label_name(outcome.verdict()->label));
      verdict["confidence"] = outcome.verdict()->confidence;
      verdict["explanation"] = outcome.verdict()->explanation;
      verdict["evidence"] = outcome.verdict()->evidence_ids;
      reply["verdict"] = std::move(verdict);
      reply["trace_id"] = trace_id;
      reply["trace_path"] = trace_path.string();
      res.set_content(reply.dump(2), "application/json");
    } catch (const Error& e) {
      int status = 500;
      switch (e.code()) {
        case Errc::ProviderUnavailable:
          status = 503;
          break;
        case Errc::ImageUnreadable:
        case Errc::EmptyText:
          status = 400;
          break;
        default:
          status = 500;
      }
      reply_error(status, errc_name(e.code()), e.what());
    }
  });
}

VerificationService::~VerificationService() { stop(); }

bool VerificationService::start(const std::string& address, int port) {
  if (!impl_->server.bind_to_port(address, port)) {
    return false;
  }
  port_ = port;
  server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return true;
}

int VerificationService::start_any(const std::string& address) {
  int port = impl_->server.bind_to_any_port(address);
  if (port < 0) return -1;
  port_ = port;
  server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void VerificationService::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
  if (server_thread_.joinable()) {
    server_thread_.join();
  }
}

}  // namespace oocheck
