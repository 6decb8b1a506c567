#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adapterforge::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Root of the checked-in source tree (corpus/, data/, templates/, tests/golden/).
std::filesystem::path source_dir();
std::filesystem::path corpus_dir(std::string_view name);
std::filesystem::path golden_path(std::string_view name);

/// Copies one corpus case into `dest` and returns the project file path there.
std::filesystem::path copy_corpus(std::string_view name, const std::filesystem::path& dest);

/// Every file of the given extension under `corpus/`, sorted.
std::vector<std::filesystem::path> corpus_files(std::string_view extension);

/// Compares against a golden file; when ADAPTERFORGE_UPDATE_GOLDEN is set, rewrites it instead.
bool matches_golden(std::string_view name, const std::string& actual);

}  // namespace adapterforge::testing
