#pragma once

#include <memory>
#include <string>
#include <thread>

#include "oocheck/pipeline.hpp"

namespace oocheck {

// Minimal verification endpoint:
//   POST /verify  {caption, image_path | image_uri | image_b64}
//     -> 200 {verdict, trace_id, trace_path}
//     -> 400 invalid request (names the field), 503 provider unavailable,
//        500 other pipeline errors; the server stays up either way.
//   GET /health -> provider reachability and cache stats.
class VerificationService {
public:
  explicit VerificationService(std::shared_ptr<Pipeline> pipeline);
  ~VerificationService();

  // Binds and serves on a background thread. Returns false when the
  // address cannot be bound.
  bool start(const std::string& address, int port);
  // Binds an ephemeral port; returns it (or -1 on failure).
  int start_any(const std::string& address);
  void stop();
  int port() const { return port_; }

private:
  struct Impl;
  std::shared_ptr<Pipeline> pipeline_;
  std::unique_ptr<Impl> impl_;
  std::thread server_thread_;
  int port_ = -1;
};

}  // namespace oocheck
