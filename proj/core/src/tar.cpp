#include "tar.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "oocheck/error.hpp"

namespace oocheck {

namespace {

constexpr size_t kBlock = 512;

void write_octal(char* field, size_t size, unsigned long long value) {
  // size includes the trailing NUL.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llo", static_cast<int>(size - 1), value);
  std::memcpy(field, buf, size - 1);
  field[size - 1] = '\0';
}

std::array<char, kBlock> make_header(const std::string& name, std::uintmax_t file_size) {
  std::array<char, kBlock> h{};
  std::string base = name;
  std::string prefix;
  if (base.size() > 100) {
    // Split at a '/' so that name fits 100 bytes and prefix fits 155.
    size_t cut = std::string::npos;
    for (size_t i = 0; i < base.size(); ++i) {
      if (base[i] == '/' && i <= 155 && base.size() - i - 1 <= 100) {
        cut = i;
        break;
      }
    }
    if (cut == std::string::npos) {
      throw Error(Errc::StoreIO, "path too long for tar header: " + name);
    }
    prefix = base.substr(0, cut);
    base = base.substr(cut + 1);
  }
  std::memcpy(h.data(), base.data(), base.size());
  write_octal(h.data() + 100, 8, 0644);            // mode
  write_octal(h.data() + 108, 8, 0);               // uid
  write_octal(h.data() + 116, 8, 0);               // gid
  write_octal(h.data() + 124, 12, file_size);      // size
  write_octal(h.data() + 136, 12, 0);              // mtime pinned: export is content-addressed
  std::memset(h.data() + 148, ' ', 8);             // checksum placeholder
  h[156] = '0';                                    // regular file
  std::memcpy(h.data() + 257, "ustar", 6);
  h[263] = '0';
  h[264] = '0';
  std::memcpy(h.data() + 345, prefix.data(), prefix.size());

  unsigned int checksum = 0;
  for (unsigned char c : h) checksum += c;
  write_octal(h.data() + 148, 8, checksum);
  h[155] = ' ';
  return h;
}

}  // namespace

void write_tar(const std::filesystem::path& tarball,
               const std::filesystem::path& base_dir,
               const std::vector<std::string>& relative_paths) {
  std::ofstream out(tarball, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::StoreIO, "cannot create " + tarball.string());
  }
  for (const auto& rel : relative_paths) {
    auto full = base_dir / rel;
    std::ifstream in(full, std::ios::binary);
    if (!in) {
      throw Error(Errc::StoreIO, "cannot read " + full.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    auto header = make_header(rel, bytes.size());
    out.write(header.data(), header.size());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    size_t pad = (kBlock - bytes.size() % kBlock) % kBlock;
    std::array<char, kBlock> zeros{};
    out.write(zeros.data(), static_cast<std::streamsize>(pad));
  }
  std::array<char, kBlock> zeros{};
  out.write(zeros.data(), zeros.size());
  out.write(zeros.data(), zeros.size());
  if (!out) {
    throw Error(Errc::StoreIO, "write failed for " + tarball.string());
  }
}

}  // namespace oocheck
