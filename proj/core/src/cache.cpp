#include "oocheck/cache.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <system_error>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/text.hpp"
#include "tar.hpp"

namespace fs = std::filesystem;

namespace oocheck {

namespace {

std::string unique_tmp_suffix() {
  static std::atomic<uint64_t> counter{0};
  return "." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1)) + ".tmp";
}

bool is_hex_digest(const std::string& name) {
  if (name.size() != 64) return false;
  for (char c : name) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string CacheKey::to_string() const {
  return provider_id + "/" + std::string(request_kind_name(kind)) + "/" + payload_digest;
}

CacheKey make_cache_key(const RetrievalRequest& request, const std::string& provider_id) {
  std::string normalized = request.kind == RequestKind::TextQuery ||
                                   request.kind == RequestKind::EmbedText
                               ? normalize_whitespace(request.payload)
                               : request.payload;
  return CacheKey{provider_id, request.kind, sha256_hex(normalized)};
}

FileCache::FileCache(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) {
    throw Error(Errc::StoreIO, "cannot create cache root " + root_.string() +
                                   ": " + ec.message());
  }
}

fs::path FileCache::entry_path(const CacheKey& key) const {
  const std::string& d = key.payload_digest;
  return root_ / key.provider_id / std::string(request_kind_name(key.kind)) /
         d.substr(0, 2) / d.substr(2, 2) / d;
}

std::optional<std::string> FileCache::get(const CacheKey& key) const {
  std::ifstream in(entry_path(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(Errc::StoreIO, "read failed for cache entry " + key.to_string());
  }
  return body;
}

bool FileCache::contains(const CacheKey& key) const {
  std::error_code ec;
  return fs::is_regular_file(entry_path(key), ec);
}

void FileCache::put(const CacheKey& key, std::string_view body) {
  fs::path target = entry_path(key);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) {
    throw Error(Errc::StoreIO, "cannot create cache directory for " +
                                   key.to_string() + ": " + ec.message());
  }
  fs::path tmp = target;
  tmp += unique_tmp_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::StoreIO, "cannot write cache entry " + key.to_string());
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) {
      throw Error(Errc::StoreIO, "write failed for cache entry " + key.to_string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(Errc::StoreIO, "cannot publish cache entry " + key.to_string() +
                                   ": " + ec.message());
  }
}

std::vector<FileCache::EntryInfo> FileCache::list() const {
  std::vector<EntryInfo> entries;
  std::error_code ec;
  if (!fs::exists(root_, ec)) return entries;
  for (auto it = fs::recursive_directory_iterator(root_, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      throw Error(Errc::StoreIO, "cache walk failed: " + ec.message());
    }
    if (!it->is_regular_file()) continue;
    const std::string name = it->path().filename().string();
    if (!is_hex_digest(name)) continue;  // skip in-flight .tmp files
    entries.push_back(EntryInfo{
        fs::relative(it->path(), root_).generic_string(), it->file_size()});
  }
  std::sort(entries.begin(), entries.end(),
            [](const EntryInfo& a, const EntryInfo& b) {
              return a.relative_path < b.relative_path;
            });
  return entries;
}

FileCache::Stats FileCache::stats() const {
  Stats stats;
  for (const auto& entry : list()) {
    ++stats.entries;
    stats.bytes += entry.bytes;
  }
  return stats;
}

void FileCache::clear() {
  std::error_code ec;
  for (const auto& child : fs::directory_iterator(root_, ec)) {
    fs::remove_all(child.path(), ec);
    if (ec) {
      throw Error(Errc::StoreIO, "cache clear failed: " + ec.message());
    }
  }
}

void FileCache::export_tar(const fs::path& tarball) const {
  std::vector<std::string> paths;
  for (const auto& entry : list()) {
    paths.push_back(entry.relative_path);
  }
  write_tar(tarball, root_, paths);
}

}  // namespace oocheck
