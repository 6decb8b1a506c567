#include "adapterforge/cli.hpp"

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <map>
#include <sstream>

#include "adapterforge/linkage.hpp"
#include "support.hpp"

namespace adapterforge::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args)
{
  std::ostringstream out;
  std::ostringstream err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> snapshot(const fs::path& root)
{
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    auto rel = fs::relative(e.path(), root).string();
    files[rel] = e.is_regular_file() ? testing::read_file(e.path()) : std::string("<dir>");
  }
  return files;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name)
  {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv()
  {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

TEST(Check, ExitCodesOverCorpus)
{
  const std::map<std::string, int> expected{
      {"exact", kExitOk}, {"bridge", kExitAdaptable}, {"missing", kExitIncompatible},
      {"incompatible", kExitIncompatible}, {"malformed", kExitError}};
  for (const auto& [name, code] : expected) {
    auto r = invoke({"check", (testing::corpus_dir(name) / "project.pdl").string()});
    EXPECT_EQ(r.code, code) << name << "\n" << r.out << r.err;
  }
}

TEST(Check, MalformedCitesPosition)
{
  auto r = invoke({"check", (testing::corpus_dir("malformed") / "project.pdl").string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("E_SYNTAX"), std::string::npos);
  EXPECT_NE(r.err.find("store.cdl:4:"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Check, StructuredOutputRoundTrips)
{
  auto r = invoke({"check", (testing::corpus_dir("bridge") / "project.pdl").string(), "--format", "structured"});
  EXPECT_EQ(r.code, kExitAdaptable);
  auto parsed = linkage::parse_check_report(r.out);
  EXPECT_EQ(linkage::check_report(parsed, linkage::Format::Structured), r.out);
}

TEST(Check, ExactHumanReportHasExactToken)
{
  auto r = invoke({"check", (testing::corpus_dir("exact") / "project.pdl").string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find(" EXACT "), std::string::npos) << r.out;
}

TEST(Adapt, ExitCodesAndArtifacts)
{
  testing::TempDir pool_dir;
  {
    testing::TempDir work;
    auto project = testing::copy_corpus("exact", work.path());
    auto before = snapshot(work.path());
    auto r = invoke({"adapt", project.string(), "--pool", pool_dir.path().string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    auto after = snapshot(work.path());
    EXPECT_EQ(after.size(), before.size() + 1);
    EXPECT_TRUE(after.count("project.report.txt"));
  }
  {
    testing::TempDir work;
    auto project = testing::copy_corpus("bridge", work.path());
    testing::TempDir emit_dir;
    auto r = invoke({"adapt", project.string(), "--pool", pool_dir.path().string(), "--emit",
                     emit_dir.path().string()});
    EXPECT_EQ(r.code, kExitAdaptable) << r.err;
    int adapters = 0;
    for (const auto& e : fs::directory_iterator(emit_dir.path())) adapters += e.path().extension() == ".adapter";
    EXPECT_EQ(adapters, 1);
    EXPECT_TRUE(fs::exists(emit_dir / "project.adapted.pdl"));
    auto check = invoke({"check", (emit_dir / "project.adapted.pdl").string(), "--specs", work.path().string(),
                         "--specs", emit_dir.path().string()});
    EXPECT_EQ(check.code, kExitOk) << check.out << check.err;
  }
  {
    testing::TempDir work;
    auto project = testing::copy_corpus("missing", work.path());
    auto r = invoke({"adapt", project.string(), "--pool", pool_dir.path().string(), "--format", "structured"});
    EXPECT_EQ(r.code, kExitIncompatible);
    auto report = linkage::parse_report(testing::read_file(work / "project.report.json"));
    ASSERT_EQ(report.unresolved.size(), 1u);
    EXPECT_EQ(report.unresolved[0].concept_id.to_string(), "crypto.hash.sha256");
  }
}

TEST(Adapt, MissingPoolIsAnError)
{
  testing::TempDir work;
  auto project = testing::copy_corpus("bridge", work.path());
  ::unsetenv("ADAPTERFORGE_POOL");
  auto r = invoke({"adapt", project.string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("E_IO"), std::string::npos);
}

TEST(Adapt, FlagWinsOverEnvironment)
{
  testing::TempDir work;
  testing::TempDir env_pool;
  testing::TempDir flag_pool;
  auto project = testing::copy_corpus("bridge", work.path());
  ScopedEnv env("ADAPTERFORGE_POOL", env_pool.path().string());
  EXPECT_EQ(invoke({"adapt", project.string(), "--pool", flag_pool.path().string()}).code, kExitAdaptable);
  EXPECT_TRUE(fs::exists(flag_pool / "index"));
  EXPECT_FALSE(fs::exists(env_pool / "index"));
  EXPECT_EQ(invoke({"adapt", project.string()}).code, kExitAdaptable);
  EXPECT_TRUE(fs::exists(env_pool / "index"));
}

TEST(Pool, ListQueryVerify)
{
  testing::TempDir pool_dir;
  auto pool = pool_dir.path().string();
  auto empty = invoke({"pool", "list", "--pool", pool});
  EXPECT_EQ(empty.code, kExitOk);
  EXPECT_TRUE(empty.out.empty());

  auto store = (testing::corpus_dir("exact") / "store.cdl").string();
  auto add = invoke({"pool", "add", store, "--pool", pool});
  EXPECT_EQ(add.code, kExitOk) << add.err;
  auto fp = add.out.substr(0, 64);

  auto query = invoke({"pool", "query", "data.store.get", "--pool", pool});
  EXPECT_EQ(query.code, kExitOk);
  EXPECT_EQ(query.out, fp + " 1.000 KeyStore\n");
  auto op_query = invoke({"pool", "query",
                          "@concept(data.store.get) op get(key: string @concept(data.store.key)) -> bytes",
                          "--pool", pool});
  EXPECT_EQ(op_query.out, fp + " 1.000 KeyStore\n") << op_query.err;

  auto list = invoke({"pool", "list", "--pool", pool});
  EXPECT_EQ(list.out, fp + " component KeyStore 1.2.0\n");

  EXPECT_EQ(invoke({"pool", "verify", "--pool", pool}).code, kExitOk);
  auto path = pool_dir / "components" / (fp + ".cdl");
  auto bytes = testing::read_file(path);
  bytes[0] = bytes[0] == 'c' ? 'C' : 'c';
  testing::write_file(path, bytes);
  auto verify = invoke({"pool", "verify", "--pool", pool});
  EXPECT_NE(verify.code, kExitOk);
  EXPECT_EQ(std::count(verify.out.begin(), verify.out.end(), '\n'), 1);
}

TEST(Usage, UnknownFlagsAreErrors)
{
  EXPECT_EQ(invoke({"check", (testing::corpus_dir("exact") / "project.pdl").string(), "--bogus"}).code, kExitError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitError);
  EXPECT_EQ(invoke({}).code, kExitError);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST(Usage, ReadOnlyCommandsDoNotMutate)
{
  testing::TempDir work;
  testing::TempDir pool_dir;
  auto project = testing::copy_corpus("bridge", work.path());
  auto pool = pool_dir.path().string();
  ASSERT_EQ(invoke({"pool", "add", (work / "clock.cdl").string(), "--pool", pool}).code, kExitOk);
  auto before_work = snapshot(work.path());
  auto before_pool = snapshot(pool_dir.path());
  invoke({"check", project.string()});
  invoke({"check", project.string(), "--format", "structured"});
  invoke({"pool", "list", "--pool", pool});
  invoke({"pool", "query", "time.delay", "--pool", pool});
  invoke({"pool", "verify", "--pool", pool});
  invoke({"aslt", "dump", project.string(), "--fold", "meta"});
  invoke({"aslt", "dump", (work / "clock.cdl").string()});
  invoke({"fmt", (work / "clock.cdl").string()});
  EXPECT_EQ(snapshot(work.path()), before_work);
  EXPECT_EQ(snapshot(pool_dir.path()), before_pool);
}

TEST(Inspect, AsltDumpAndFmt)
{
  auto clock = (testing::corpus_dir("bridge") / "clock.cdl").string();
  auto dump = invoke({"aslt", "dump", clock, "--fold", "meta"});
  EXPECT_EQ(dump.code, kExitOk);
  EXPECT_EQ(dump.out,
            "component Clock\n"
            "  interface Sleeper\n"
            "    operation sleep\n"
            "      parameter tag\n"
            "      parameter seconds\n"
            "      parameter precise\n");
  auto fmt = invoke({"fmt", clock});
  EXPECT_EQ(fmt.code, kExitOk);
  EXPECT_TRUE(testing::matches_golden("clock.cdl", fmt.out));
  auto bad = invoke({"fmt", (testing::corpus_dir("malformed") / "store.cdl").string()});
  EXPECT_EQ(bad.code, kExitError);
}

TEST(Binary, ExitCodeReachesShell)
{
  auto run_binary = [](const std::string& args) {
    std::string cmd = std::string("\"") + ADAPTERFORGE_BINARY + "\" " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(run_binary("check \"" + (testing::corpus_dir("exact") / "project.pdl").string() + "\""), kExitOk);
  EXPECT_EQ(run_binary("check \"" + (testing::corpus_dir("bridge") / "project.pdl").string() + "\""),
            kExitAdaptable);
  EXPECT_EQ(run_binary("check \"" + (testing::corpus_dir("malformed") / "project.pdl").string() + "\""),
            kExitError);
}

}  // namespace
}  // namespace adapterforge::cli
