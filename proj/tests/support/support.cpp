#include "support.hpp"

#include <stdlib.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adapterforge::testing {

namespace fs = std::filesystem;

TempDir::TempDir()
{
  std::string tmpl = (fs::temp_directory_path() / "adapterforge-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir()
{
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

fs::path source_dir()
{
  return fs::path(ADAPTERFORGE_SOURCE_DIR);
}

fs::path corpus_dir(std::string_view name)
{
  return source_dir() / "corpus" / name;
}

fs::path golden_path(std::string_view name)
{
  return source_dir() / "tests" / "golden" / name;
}

fs::path copy_corpus(std::string_view name, const fs::path& dest)
{
  fs::create_directories(dest);
  for (const auto& entry : fs::directory_iterator(corpus_dir(name))) {
    fs::copy_file(entry.path(), dest / entry.path().filename(), fs::copy_options::overwrite_existing);
  }
  return dest / "project.pdl";
}

std::vector<fs::path> corpus_files(std::string_view extension)
{
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(source_dir() / "corpus")) {
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool matches_golden(std::string_view name, const std::string& actual)
{
  auto path = golden_path(name);
  if (std::getenv("ADAPTERFORGE_UPDATE_GOLDEN")) {
    write_file(path, actual);
    return true;
  }
  return read_file(path) == actual;
}

}  // namespace adapterforge::testing
