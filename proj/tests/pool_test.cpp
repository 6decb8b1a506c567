#include "adapterforge/pool.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include <functional>

#include "adapterforge/digest.hpp"
#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"
#include "generators.hpp"
#include "support.hpp"

namespace adapterforge::pool {
namespace {

namespace fs = std::filesystem;

PoolOptions fixed_clock()
{
  PoolOptions o;
  o.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  return o;
}

ErrorCode code_of(const std::function<void()>& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Syntax;
}

spec::ComponentSpec sorter(const std::string& name, const std::string& concept_path)
{
  return spec::parse_component("component \"" + name + "\" version \"1.0.0\" {\n  provides interface Sorting {\n"
                               "    @concept(" + concept_path + ")\n"
                               "    op sort(items: list<i32> @concept(data.items), ascending: bool @concept(data.asc) = true) -> list<i32>;\n"
                               "  }\n}\n");
}

analyser::Demand sort_demand()
{
  auto op = spec::parse_operation(
      "@concept(data.sorting.sort) op sort(items: list<i32> @concept(data.items), ascending: bool @concept(data.asc) = true) -> list<i32>;");
  spec::Connection origin{{"C", "R"}, {"P", "S"}, {}};
  return analyser::demand_for(op, origin);
}

TEST(Pool, EmptyPool)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  EXPECT_FALSE(pool.initialized());
  EXPECT_TRUE(pool.index().entries.empty());
  EXPECT_TRUE(pool.query({sort_demand(), std::nullopt}, analyser::ConversionTable::builtin()).empty());
  pool.init();
  EXPECT_TRUE(pool.initialized());
  EXPECT_TRUE(pool.verify().empty());
}

TEST(Pool, MissingRootIsIoError)
{
  testing::TempDir dir;
  Pool pool(dir / "absent", fixed_clock());
  EXPECT_EQ(code_of([&] { pool.index(); }), ErrorCode::Io);
}

TEST(Pool, AddIsIdempotentAndContentAddressed)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  auto c = sorter("Sorter", "data.sorting.sort");
  auto fp = pool.add(c);
  EXPECT_EQ(fp.size(), 64u);
  EXPECT_EQ(pool.add(c), fp);
  auto idx = pool.index();
  ASSERT_EQ(idx.entries.size(), 1u);
  const auto& entry = idx.entries.at(fp);
  EXPECT_EQ(entry.kind, EntryKind::Component);
  EXPECT_EQ(entry.name, "Sorter");
  EXPECT_EQ(entry.provided_concepts, (std::vector<spec::ConceptId>{*spec::ConceptId::parse("data.sorting.sort")}));
  EXPECT_EQ(entry.stored_at, "2026-01-01T00:00:00Z");
  auto bytes = testing::read_file(dir.path() / entry.path);
  EXPECT_EQ(sha256_hex(bytes), fp);
  EXPECT_EQ(std::get<spec::ComponentSpec>(pool.get(fp)), c);
}

TEST(Pool, RejectsInvalidDocuments)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  EXPECT_EQ(code_of([&] { pool.add_text("component \"A\" version \"1\" { }"); }), ErrorCode::InvalidSpec);
  auto bad = spec::parse_component(R"(component "A" version "1.0.0" {
  provides interface I {
    @concept(a.b)
    op f(x: i32 = true) -> i32;
  }
})");
  EXPECT_EQ(code_of([&] { pool.add(bad); }), ErrorCode::InvalidSpec);
}

TEST(Pool, UnknownFingerprint)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  pool.init();
  EXPECT_EQ(code_of([&] { pool.get(std::string(64, 'a')); }), ErrorCode::NoEntry);
}

TEST(Pool, TamperDetected)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  auto fp = pool.add(sorter("Sorter", "data.sorting.sort"));
  pool.add(sorter("Other", "data.sorting"));
  auto path = dir.path() / pool.index().entries.at(fp).path;
  auto bytes = testing::read_file(path);
  bytes[10] ^= 0x01;
  testing::write_file(path, bytes);
  EXPECT_EQ(code_of([&] { pool.get(fp); }), ErrorCode::Corrupt);
  auto findings = pool.verify();
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, FindingKind::HashMismatch);
  EXPECT_EQ(findings[0].fingerprint, fp);
}

TEST(Pool, DanglingEntry)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  auto fp = pool.add(sorter("Sorter", "data.sorting.sort"));
  fs::remove(dir.path() / pool.index().entries.at(fp).path);
  auto findings = pool.verify();
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].kind, FindingKind::Dangling);
  EXPECT_EQ(code_of([&] { pool.get(fp); }), ErrorCode::Corrupt);
}

TEST(Pool, MalformedIndexIsCorrupt)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  pool.init();
  testing::write_file(dir.path() / "index", "{ nope");
  EXPECT_EQ(code_of([&] { pool.index(); }), ErrorCode::Corrupt);
}

TEST(Pool, TempFilesAreIgnored)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  pool.add(sorter("Sorter", "data.sorting.sort"));
  testing::write_file(dir.path() / "components" / ".tmp-partial-1-0", "component \"Half");
  testing::write_file(dir.path() / ".tmp-index-1-0", "{");
  EXPECT_EQ(pool.index().entries.size(), 1u);
  EXPECT_TRUE(pool.verify().empty());
}

TEST(Pool, QueryRanksExactBeforeAncestor)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  auto exact = pool.add(sorter("Exact", "data.sorting.sort"));
  auto parent = pool.add(sorter("Parent", "data.sorting"));
  pool.add(sorter("Unrelated", "data.hashing"));
  auto table = analyser::ConversionTable::builtin();
  auto hits = pool.query({sort_demand(), std::nullopt}, table);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].fingerprint, exact);
  EXPECT_EQ(hits[0].score, Rational(1));
  EXPECT_EQ(hits[1].fingerprint, parent);
  // Scores agree with the analyser for the same pair.
  auto demanded = analyser::demand_signature(sort_demand());
  auto provided = sorter("Parent", "data.sorting").provided[0].operations[0];
  auto direct = analyser::match_operation(demanded, provided, table);
  ASSERT_TRUE(direct);
  EXPECT_EQ(hits[1].score, direct->score);
  EXPECT_EQ(hits[1].score, Rational(9, 10));
}

TEST(Pool, QueryHonoursVersionConstraint)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  auto old_one = sorter("Sorter", "data.sorting.sort");
  auto new_one = old_one;
  new_one.version = {2, 0, 0};
  pool.add(old_one);
  auto fp_new = pool.add(new_one);
  auto hits = pool.query({sort_demand(), spec::VersionConstraint::parse(">=2.0.0")},
                         analyser::ConversionTable::builtin());
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].fingerprint, fp_new);
}

TEST(Pool, StoresAdapters)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  adapter::AdapterSpec a;
  a.name = "adapt_A_B_12345678";
  a.consumer_component = "A";
  a.provider_component = "B";
  a.provider_version = {1, 0, 0};
  a.implements = sorter("X", "data.sorting.sort").provided[0];
  a.implements.direction = spec::Direction::Required;
  a.delegates_to = sorter("Y", "data.sorting.sort").provided[0];
  a.mappings.push_back({"sort", "sort", {adapter::Take{0}, adapter::Take{1}}, std::nullopt});
  a.provenance.project = "p";
  auto fp = pool.add(a);
  EXPECT_EQ(pool.index().entries.at(fp).kind, EntryKind::Adapter);
  EXPECT_EQ(pool.index().entries.at(fp).path, "adapters/" + fp + ".adapter");
  EXPECT_EQ(std::get<adapter::AdapterSpec>(pool.get(fp)), a);
  EXPECT_EQ(pool.add_text(adapter::emit_descriptor(a)), fp);
}

TEST(Pool, LockTimeout)
{
  testing::TempDir dir;
  PoolOptions o = fixed_clock();
  o.lock_timeout = std::chrono::milliseconds(100);
  Pool pool(dir.path(), o);
  pool.init();
  int fd = ::open((dir.path() / "index.lock").c_str(), O_RDWR | O_CREAT, 0644);
  ASSERT_GE(fd, 0);
  ASSERT_EQ(::flock(fd, LOCK_EX), 0);
  pid_t child = ::fork();
  ASSERT_GE(child, 0);
  if (child == 0) {
    // The lock belongs to the parent's open file description; a child needs its own.
    Pool other(dir.path(), o);
    int code = 0;
    try {
      other.add(sorter("Sorter", "data.sorting.sort"));
    } catch (const Error& e) {
      code = e.code() == ErrorCode::Lock ? 0 : 2;
      ::_exit(code);
    }
    ::_exit(1);
  }
  int status = 0;
  ::waitpid(child, &status, 0);
  ::flock(fd, LOCK_UN);
  ::close(fd);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}

TEST(Pool, ConcurrentAddsFromTwoProcesses)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  pool.init();
  constexpr int kPerProcess = 20;
  std::vector<pid_t> children;
  for (int p = 0; p < 2; ++p) {
    pid_t child = ::fork();
    ASSERT_GE(child, 0);
    if (child == 0) {
      int rc = 0;
      try {
        Pool mine(dir.path(), fixed_clock());
        for (int i = 0; i < kPerProcess; ++i) {
          mine.add(sorter("P" + std::to_string(p) + "N" + std::to_string(i), "data.sorting.sort"));
        }
      } catch (...) {
        rc = 1;
      }
      ::_exit(rc);
    }
    children.push_back(child);
  }
  for (pid_t c : children) {
    int status = 0;
    ::waitpid(c, &status, 0);
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
  }
  EXPECT_EQ(pool.index().entries.size(), static_cast<std::size_t>(2 * kPerProcess));
  EXPECT_TRUE(pool.verify().empty());
}

TEST(Pool, RandomComponentsRoundTrip)
{
  testing::TempDir dir;
  Pool pool(dir.path(), fixed_clock());
  testing::Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    auto c = testing::random_component(rng);
    auto fp = pool.add(c);
    EXPECT_EQ(fp, fingerprint_of(c));
    EXPECT_EQ(std::get<spec::ComponentSpec>(pool.get(fp)), c);
  }
  EXPECT_TRUE(pool.verify().empty());
}

}  // namespace
}  // namespace adapterforge::pool
