#include "adapterforge/pool.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "adapterforge/codec.hpp"
#include "adapterforge/digest.hpp"
#include "adapterforge/error.hpp"
#include "adapterforge/spec_lang.hpp"

namespace adapterforge::pool {

namespace fs = std::filesystem;
using codec::json;

namespace {

constexpr std::string_view kIndexFormat = "adapterforge-pool/1";
constexpr std::string_view kTempPrefix = ".tmp-";

std::string read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "error reading '" + path.string() + "'");
  return ss.str();
}

/// Writes a sibling temp file then renames it over `path`.
void write_atomic(const fs::path& path, std::string_view bytes)
{
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path.parent_path() / (std::string(kTempPrefix) + path.filename().string() + "-" +
                                       std::to_string(::getpid()) + "-" + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into '" + path.string() + "'");
  }
}

class LockGuard {
 public:
  LockGuard(const fs::path& path, std::chrono::milliseconds timeout)
  {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open lock '" + path.string() + "': " + std::strerror(errno));
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      if (errno != EWOULDBLOCK && errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::Io, "cannot lock '" + path.string() + "': " + std::strerror(errno));
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        ::close(fd_);
        throw Error(ErrorCode::Lock, "pool lock '" + path.string() + "' not acquired within " +
                                         std::to_string(timeout.count()) + " ms");
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  ~LockGuard()
  {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockGuard(const LockGuard&) = delete;
  LockGuard& operator=(const LockGuard&) = delete;

 private:
  int fd_ = -1;
};

json encode_index(const PoolIndex& index)
{
  json entries = json::object();
  for (const auto& [fp, e] : index.entries) {
    json concepts = json::array();
    for (const auto& c : e.provided_concepts) concepts.push_back(c.to_string());
    entries[fp] = {{"kind", to_string(e.kind)},
                   {"name", e.name},
                   {"version", e.version.to_string()},
                   {"provided_concepts", std::move(concepts)},
                   {"path", e.path},
                   {"stored_at", e.stored_at}};
  }
  return {{"format", kIndexFormat}, {"entries", std::move(entries)}};
}

PoolIndex decode_index(const json& doc)
{
  PoolIndex index;
  if (doc.at("format").get<std::string>() != kIndexFormat) throw Error(ErrorCode::Corrupt, "unknown index format");
  for (const auto& [fp, j] : doc.at("entries").items()) {
    IndexEntry e;
    auto kind = j.at("kind").get<std::string>();
    if (kind == "component") {
      e.kind = EntryKind::Component;
    } else if (kind == "adapter") {
      e.kind = EntryKind::Adapter;
    } else {
      throw Error(ErrorCode::Corrupt, "unknown entry kind '" + kind + "'");
    }
    e.name = j.at("name").get<std::string>();
    auto v = spec::Version::parse(j.at("version").get<std::string>());
    if (!v) throw Error(ErrorCode::Corrupt, "bad version in index entry " + fp);
    e.version = *v;
    for (const auto& c : j.at("provided_concepts")) e.provided_concepts.push_back(spec::ConceptId::from_path(c.get<std::string>()));
    e.path = j.at("path").get<std::string>();
    e.stored_at = j.at("stored_at").get<std::string>();
    index.entries.emplace(fp, std::move(e));
  }
  return index;
}

bool is_fingerprint(std::string_view fp)
{
  return fp.size() == 64 && std::all_of(fp.begin(), fp.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::vector<spec::ConceptId> provided_concepts(const spec::ComponentSpec& c)
{
  std::set<spec::ConceptId> out;
  for (const auto& iface : c.provided) {
    for (const auto& op : iface.operations) out.insert(op.concept_id);
  }
  return {out.begin(), out.end()};
}

}  // namespace

std::string_view to_string(EntryKind kind)
{
  return kind == EntryKind::Component ? "component" : "adapter";
}

std::string_view to_string(FindingKind kind)
{
  return kind == FindingKind::HashMismatch ? "HASH_MISMATCH" : "DANGLING";
}

std::string canonical_bytes(const Artifact& artifact)
{
  if (const auto* c = std::get_if<spec::ComponentSpec>(&artifact)) return spec::serialize(*c);
  return adapter::emit_descriptor(std::get<adapter::AdapterSpec>(artifact));
}

Fingerprint fingerprint_of(const Artifact& artifact)
{
  return sha256_hex(canonical_bytes(artifact));
}

Artifact parse_artifact(std::string_view text)
{
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return adapter::parse_descriptor(text);
  try {
    return spec::parse_component(text);
  } catch (const ParseError& e) {
    throw Error(ErrorCode::InvalidSpec, e.detail());
  }
}

spec::ComponentSpec component_view(const Artifact& artifact)
{
  if (const auto* c = std::get_if<spec::ComponentSpec>(&artifact)) return *c;
  return std::get<adapter::AdapterSpec>(artifact).as_component();
}

std::string utc_now()
{
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Pool::Pool(fs::path root, PoolOptions options) : root_(std::move(root)), options_(std::move(options))
{
  if (!options_.clock) options_.clock = utc_now;
}

bool Pool::initialized() const
{
  std::error_code ec;
  return fs::is_regular_file(root_ / "index", ec);
}

void Pool::init() const
{
  std::error_code ec;
  fs::create_directories(root_ / "components", ec);
  if (!ec) fs::create_directories(root_ / "adapters", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create pool at '" + root_.string() + "': " + ec.message());
  if (initialized()) return;
  LockGuard lock(root_ / "index.lock", options_.lock_timeout);
  if (!initialized()) write_atomic(root_ / "index", codec::canonical(encode_index({})));
}

PoolIndex Pool::index() const
{
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) throw Error(ErrorCode::Io, "pool directory '" + root_.string() + "' does not exist");
  if (!initialized()) return {};
  auto text = read_file(root_ / "index");
  try {
    return decode_index(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Corrupt, std::string("pool index is malformed: ") + e.what());
  }
}

Fingerprint Pool::add(const Artifact& artifact) const
{
  auto component = component_view(artifact);
  auto violations = spec::validate(component);
  if (!violations.empty()) {
    throw Error(ErrorCode::InvalidSpec, "'" + component.name + "' does not validate: " + violations.front().message);
  }
  const std::string bytes = canonical_bytes(artifact);
  const Fingerprint fp = sha256_hex(bytes);
  const bool is_adapter = std::holds_alternative<adapter::AdapterSpec>(artifact);
  const std::string rel = is_adapter ? "adapters/" + fp + ".adapter" : "components/" + fp + ".cdl";

  init();
  LockGuard lock(root_ / "index.lock", options_.lock_timeout);
  PoolIndex idx = index();
  if (idx.entries.count(fp)) return fp;
  write_atomic(root_ / rel, bytes);
  idx.entries.emplace(fp, IndexEntry{is_adapter ? EntryKind::Adapter : EntryKind::Component, component.name,
                                     component.version, provided_concepts(component), rel, options_.clock()});
  write_atomic(root_ / "index", codec::canonical(encode_index(idx)));
  return fp;
}

Fingerprint Pool::add_text(std::string_view document) const
{
  return add(parse_artifact(document));
}

namespace {

Artifact load_entry(const fs::path& root, const Fingerprint& fp, const IndexEntry& entry)
{
  std::string bytes;
  try {
    bytes = read_file(root / entry.path);
  } catch (const Error&) {
    throw Error(ErrorCode::Corrupt, "pool entry " + fp + " has no file at '" + entry.path + "'");
  }
  if (sha256_hex(bytes) != fp) throw Error(ErrorCode::Corrupt, "pool entry " + fp + " does not hash to its fingerprint");
  try {
    return parse_artifact(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::Corrupt, "pool entry " + fp + " does not parse: " + e.detail());
  }
}

}  // namespace

Artifact Pool::get(const Fingerprint& fp) const
{
  PoolIndex idx = index();
  auto it = idx.entries.find(fp);
  if (it == idx.entries.end()) throw Error(ErrorCode::NoEntry, "no pool entry " + fp);
  return load_entry(root_, fp, it->second);
}

std::optional<Rational> score_against(const analyser::Demand& demand, const spec::OperationSig& provided,
                                      const analyser::ConversionTable& conv, const analyser::MatchPolicy& policy)
{
  if (!demand.shape) return analyser::concept_only_score(demand.concept_id, provided.concept_id, policy);
  auto m = analyser::match_operation(analyser::demand_signature(demand), provided, conv, policy);
  if (!m) return std::nullopt;
  return m->score;
}

std::vector<QueryHit> Pool::query(const PoolQuery& q, const analyser::ConversionTable& conv,
                                  const analyser::MatchPolicy& policy) const
{
  std::vector<QueryHit> hits;
  for (const auto& [fp, entry] : index().entries) {
    if (q.constraint && !q.constraint->admits(entry.version)) continue;
    bool related = std::any_of(entry.provided_concepts.begin(), entry.provided_concepts.end(),
                               [&](const spec::ConceptId& c) { return q.demand.concept_id.distance(c).has_value(); });
    if (!related) continue;
    auto component = component_view(load_entry(root_, fp, entry));
    std::optional<QueryHit> best;
    for (const auto& iface : component.provided) {
      for (const auto& op : iface.operations) {
        if (!q.demand.concept_id.distance(op.concept_id)) continue;
        auto score = score_against(q.demand, op, conv, policy);
        if (score && (!best || *score > best->score)) {
          best = QueryHit{fp, *score, entry.kind, entry.name, iface.name, op.name};
        }
      }
    }
    if (best) hits.push_back(std::move(*best));
  }
  std::sort(hits.begin(), hits.end(), [](const QueryHit& a, const QueryHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.fingerprint < b.fingerprint;
  });
  return hits;
}

std::vector<Finding> Pool::verify() const
{
  std::vector<Finding> findings;
  for (const auto& [fp, entry] : index().entries) {
    fs::path path = root_ / entry.path;
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      findings.push_back({FindingKind::Dangling, fp, entry.path, "indexed file is missing"});
      continue;
    }
    if (!is_fingerprint(fp) || sha256_hex(read_file(path)) != fp) {
      findings.push_back({FindingKind::HashMismatch, fp, entry.path, "content does not hash to its fingerprint"});
    }
  }
  return findings;
}

}  // namespace adapterforge::pool
