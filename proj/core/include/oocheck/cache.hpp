#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oocheck/types.hpp"

namespace oocheck {

struct CacheKey {
  std::string provider_id;
  RequestKind kind = RequestKind::TextQuery;
  std::string payload_digest;  // lowercase hex SHA-256 of the normalized payload

  std::string to_string() const;
  bool operator==(const CacheKey&) const = default;
};

// Key for a provider request. Text payloads are whitespace-normalized
// before digesting; binary payloads are digested as-is. The limit field
// never participates, so responses replay across different limits.
CacheKey make_cache_key(const RetrievalRequest& request, const std::string& provider_id);

// One-file-per-entry store under a two-level fan-out directory. Writes
// publish via atomic rename, so readers never observe torn entries.
class FileCache {
public:
  explicit FileCache(std::filesystem::path root);

  std::optional<std::string> get(const CacheKey& key) const;
  void put(const CacheKey& key, std::string_view body);
  bool contains(const CacheKey& key) const;

  struct EntryInfo {
    std::string relative_path;
    std::uintmax_t bytes = 0;
  };
  struct Stats {
    std::size_t entries = 0;
    std::uintmax_t bytes = 0;
  };

  std::vector<EntryInfo> list() const;
  Stats stats() const;
  void clear();
  void export_tar(const std::filesystem::path& tarball) const;

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path entry_path(const CacheKey& key) const;

private:
  std::filesystem::path root_;
};

}  // namespace oocheck
