#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/byte_range.hpp"
#include "edgar/http_transport.hpp"

namespace edgar {

/// Key scheme: raw filings mirror the archive path, document bodies and
/// their extracted text are addressed by the SHA-1 of the body.
std::string key_for_raw_filing(std::string_view edgar_path);
std::string key_for_document(std::string_view sha1);
std::string key_for_text(std::string_view sha1);

/// Throws InvalidPath for empty keys, leading '/', or ".." segments.
void validate_key(std::string_view key);

struct ObjectRef {
    std::string key;
    bool compressed = false;
    std::uint64_t stored_length = 0;
    std::uint64_t logical_length = 0;

    friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

/// What a backend persists next to the stored bytes.
struct ObjectMeta {
    bool compressed = false;
    std::uint64_t stored_length = 0;
    std::uint64_t logical_length = 0;
    std::string sha1;   // of the logical bytes

    friend bool operator==(const ObjectMeta&, const ObjectMeta&) = default;
};

struct StoreStats {
    std::uint64_t object_count = 0;
    std::uint64_t total_stored_bytes = 0;
    std::uint64_t total_logical_bytes = 0;
};

/// Pull-style key iterator; keys come out in lexicographic order and are
/// produced as the caller asks for them.
class KeyCursor {
public:
    virtual ~KeyCursor() = default;
    virtual std::optional<std::string> next() = 0;
};

std::vector<std::string> drain(KeyCursor& cursor);

/// Raw persistence: bytes exactly as given plus their metadata.
class StorageBackend {
public:
    virtual ~StorageBackend() = default;

    virtual void write(const std::string& key, std::string_view stored, const ObjectMeta& meta) = 0;
    virtual std::optional<ObjectMeta> head(const std::string& key) = 0;
    /// Stored bytes, optionally a stored-byte range.
    virtual std::optional<std::string> read(const std::string& key, std::optional<ByteRange> range) = 0;
    virtual bool remove(const std::string& key) = 0;
    virtual std::unique_ptr<KeyCursor> list(const std::string& prefix) = 0;
    virtual std::string describe() const = 0;
};

/// Objects under <root>/objects, metadata sidecars under <root>/meta. A key
/// whose last segment is a SHA-1 lives in a subdirectory named after the
/// digest's first two characters.
std::unique_ptr<StorageBackend> make_filesystem_backend(const std::filesystem::path& root);

struct S3Config {
    std::string endpoint;   // http(s)://host[:port]
    std::string bucket;
    std::string region = "us-east-1";
    std::string access_key;
    std::string secret_key;
    int page_size = 1000;
};

/// Path-style S3 API (PUT/GET/HEAD/DELETE, ListObjectsV2) signed with SigV4.
/// Compression metadata travels in x-amz-meta-* headers.
std::unique_ptr<StorageBackend> make_s3_backend(S3Config config, std::shared_ptr<HttpTransport> transport);

enum class SweepPredicate { rate_limited, empty, access_denied };

std::string_view to_string(SweepPredicate predicate) noexcept;
std::optional<SweepPredicate> parse_sweep_predicate(std::string_view text) noexcept;

struct SweepHit {
    std::string key;
    std::string reason;

    friend bool operator==(const SweepHit&, const SweepHit&) = default;
};

struct ObjectStoreOptions {
    std::optional<std::uint64_t> quota_bytes;
    /// Directory holding sweep lock files; empty disables prefix locking.
    std::filesystem::path lock_dir;
    std::vector<std::string> rate_limit_signatures;
    std::vector<std::string> access_denied_signatures;
};

/// Content store with transparent gzip compression and logical byte ranges.
///
/// Ranged reads of a compressed object inflate the whole object and slice
/// the result, so they cost a full read.
class ObjectStore {
public:
    explicit ObjectStore(std::unique_ptr<StorageBackend> backend, ObjectStoreOptions options = {});

    /// Idempotent for identical bytes. Different bytes overwrite with a
    /// warning in the log.
    ObjectRef put(const std::string& key, std::string_view data, bool compress);

    /// Logical bytes. Throws NotFound or CorruptObject.
    std::string get(const std::string& key, std::optional<ByteRange> byte_range = std::nullopt);

    std::optional<ObjectRef> stat(const std::string& key);
    bool exists(const std::string& key);
    bool remove(const std::string& key);
    std::unique_ptr<KeyCursor> list_keys(const std::string& prefix);

    /// Lists (and unless dry_run, deletes) objects under `prefix` matching the
    /// predicate. Holds a lock file for the prefix while running; puts under a
    /// locked prefix throw Locked.
    std::vector<SweepHit> sweep(const std::string& prefix, SweepPredicate predicate, bool dry_run);

    StoreStats stats(const std::string& prefix = "");

    StorageBackend& backend() noexcept { return *backend_; }

private:
    void check_not_locked(const std::string& key) const;
    void check_quota(std::uint64_t incoming);

    std::unique_ptr<StorageBackend> backend_;
    ObjectStoreOptions options_;
    std::mutex quota_mutex_;
    std::optional<std::uint64_t> stored_total_;
};

} // namespace edgar
