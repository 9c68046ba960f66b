#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace oocheck {

// Minimal ustar writer: regular files only, long paths split across the
// ustar prefix field. Enough for `cache export`.
void write_tar(const std::filesystem::path& tarball,
               const std::filesystem::path& base_dir,
               const std::vector<std::string>& relative_paths);

}  // namespace oocheck
