#include "edgar/object_store.hpp"

#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "edgar/compression.hpp"
#include "edgar/digest.hpp"
#include "edgar/edgar_client.hpp"
#include "edgar/error.hpp"

namespace edgar {

void validate_key(std::string_view key)
{
    if (key.empty()) {
        throw Error(ErrorCode::InvalidPath, "object key is empty");
    }
    if (key.front() == '/' || key.back() == '/') {
        throw Error(ErrorCode::InvalidPath, "object key '" + std::string(key) + "' has a leading or trailing '/'");
    }
    std::size_t start = 0;
    while (start <= key.size()) {
        auto end = key.find('/', start);
        if (end == std::string_view::npos) {
            end = key.size();
        }
        const auto segment = key.substr(start, end - start);
        if (segment.empty() || segment == "." || segment == "..") {
            throw Error(ErrorCode::InvalidPath, "object key '" + std::string(key) + "' has an empty or dot segment");
        }
        start = end + 1;
    }
    for (char c : key) {
        if (c == '\\' || static_cast<unsigned char>(c) < 0x20) {
            throw Error(ErrorCode::InvalidPath, "object key contains a control character or backslash");
        }
    }
}

std::string key_for_raw_filing(std::string_view edgar_path)
{
    validate_key(edgar_path);
    return "filings/raw/" + std::string(edgar_path);
}

std::string key_for_document(std::string_view sha1)
{
    if (!is_sha1_hex(sha1)) {
        throw Error(ErrorCode::InvalidDigest, "'" + std::string(sha1) + "' is not a lowercase SHA-1 hex digest");
    }
    return "documents/raw/" + std::string(sha1);
}

std::string key_for_text(std::string_view sha1)
{
    if (!is_sha1_hex(sha1)) {
        throw Error(ErrorCode::InvalidDigest, "'" + std::string(sha1) + "' is not a lowercase SHA-1 hex digest");
    }
    return "documents/text/" + std::string(sha1);
}

std::vector<std::string> drain(KeyCursor& cursor)
{
    std::vector<std::string> keys;
    while (auto key = cursor.next()) {
        keys.push_back(std::move(*key));
    }
    return keys;
}

std::string_view to_string(SweepPredicate predicate) noexcept
{
    switch (predicate) {
    case SweepPredicate::rate_limited: return "rate-limited";
    case SweepPredicate::empty: return "empty";
    case SweepPredicate::access_denied: return "access-denied";
    }
    return "unknown";
}

std::optional<SweepPredicate> parse_sweep_predicate(std::string_view text) noexcept
{
    for (auto p : {SweepPredicate::rate_limited, SweepPredicate::empty, SweepPredicate::access_denied}) {
        if (to_string(p) == text) {
            return p;
        }
    }
    return std::nullopt;
}

namespace {

ObjectRef to_ref(const std::string& key, const ObjectMeta& meta)
{
    return {key, meta.compressed, meta.stored_length, meta.logical_length};
}

std::string lock_file_name(std::string_view prefix)
{
    return "sweep-" + sha1_hex(prefix) + ".lock";
}

class SweepLock {
public:
    SweepLock(const std::filesystem::path& dir, const std::string& prefix)
    {
        if (dir.empty()) {
            return;
        }
        std::filesystem::create_directories(dir);
        path_ = dir / lock_file_name(prefix);
        std::FILE* file = std::fopen(path_.c_str(), "wx");
        if (!file) {
            path_.clear();
            throw Error(ErrorCode::Locked, "a sweep already holds prefix '" + prefix + "'");
        }
        std::fwrite(prefix.data(), 1, prefix.size(), file);
        std::fclose(file);
    }
    SweepLock(const SweepLock&) = delete;
    SweepLock& operator=(const SweepLock&) = delete;
    ~SweepLock()
    {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

private:
    std::filesystem::path path_;
};

} // namespace

ObjectStore::ObjectStore(std::unique_ptr<StorageBackend> backend, ObjectStoreOptions options)
    : backend_(std::move(backend)), options_(std::move(options))
{
    if (!backend_) {
        throw Error(ErrorCode::InvalidArgument, "object store needs a backend");
    }
    if (options_.rate_limit_signatures.empty()) {
        options_.rate_limit_signatures = default_rate_limit_signatures();
    }
    if (options_.access_denied_signatures.empty()) {
        options_.access_denied_signatures = default_access_denied_signatures();
    }
}

void ObjectStore::check_not_locked(const std::string& key) const
{
    if (options_.lock_dir.empty()) {
        return;
    }
    std::error_code ec;
    for (std::filesystem::directory_iterator it(options_.lock_dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->path().extension() != ".lock") {
            continue;
        }
        std::ifstream in(it->path(), std::ios::binary);
        std::stringstream prefix;
        prefix << in.rdbuf();
        if (key.starts_with(prefix.str())) {
            throw Error(ErrorCode::Locked, "key '" + key + "' is under a prefix being swept");
        }
    }
}

void ObjectStore::check_quota(std::uint64_t incoming)
{
    if (!options_.quota_bytes) {
        return;
    }
    std::lock_guard lock(quota_mutex_);
    if (!stored_total_) {
        stored_total_ = stats().total_stored_bytes;
    }
    if (*stored_total_ + incoming > *options_.quota_bytes) {
        throw Error(ErrorCode::QuotaExceeded, "storing " + std::to_string(incoming) + " bytes would exceed the quota of " +
                                                  std::to_string(*options_.quota_bytes));
    }
    *stored_total_ += incoming;
}

ObjectRef ObjectStore::put(const std::string& key, std::string_view data, bool compress)
{
    validate_key(key);
    check_not_locked(key);

    ObjectMeta meta;
    meta.sha1 = sha1_hex(data);
    meta.logical_length = data.size();
    const auto existing = backend_->head(key);
    if (existing && existing->sha1 == meta.sha1 && existing->logical_length == meta.logical_length) {
        return to_ref(key, *existing);
    }

    std::string compressed;
    std::string_view stored = data;
    if (compress) {
        compressed = gzip_compress(data);
        stored = compressed;
    }
    meta.compressed = compress;
    meta.stored_length = stored.size();

    check_quota(meta.stored_length);
    if (existing) {
        spdlog::warn("overwriting {} ({} -> {})", key, existing->sha1, meta.sha1);
    }
    backend_->write(key, stored, meta);
    if (existing && options_.quota_bytes) {
        std::lock_guard lock(quota_mutex_);
        if (stored_total_) {
            *stored_total_ -= std::min(*stored_total_, existing->stored_length);
        }
    }
    return to_ref(key, meta);
}

std::string ObjectStore::get(const std::string& key, std::optional<ByteRange> byte_range)
{
    validate_key(key);
    if (byte_range) {
        require_valid(*byte_range);
    }
    const auto meta = backend_->head(key);
    if (!meta) {
        throw Error(ErrorCode::NotFound, "no object at '" + key + "'");
    }
    if (!meta->compressed) {
        auto bytes = backend_->read(key, byte_range);
        if (!bytes) {
            throw Error(ErrorCode::NotFound, "no object at '" + key + "'");
        }
        if (!byte_range && bytes->size() != meta->logical_length) {
            throw Error(ErrorCode::CorruptObject, "object '" + key + "' has " + std::to_string(bytes->size()) +
                                                      " bytes, metadata says " + std::to_string(meta->logical_length));
        }
        return std::move(*bytes);
    }
    auto stored = backend_->read(key, std::nullopt);
    if (!stored) {
        throw Error(ErrorCode::NotFound, "no object at '" + key + "'");
    }
    std::string logical;
    try {
        logical = gzip_decompress(*stored);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptObject, "object '" + key + "' is flagged compressed but " + e.what());
    }
    if (logical.size() != meta->logical_length) {
        throw Error(ErrorCode::CorruptObject, "object '" + key + "' inflated to an unexpected length");
    }
    return byte_range ? slice(logical, *byte_range) : logical;
}

std::optional<ObjectRef> ObjectStore::stat(const std::string& key)
{
    validate_key(key);
    if (auto meta = backend_->head(key)) {
        return to_ref(key, *meta);
    }
    return std::nullopt;
}

bool ObjectStore::exists(const std::string& key) { return stat(key).has_value(); }

bool ObjectStore::remove(const std::string& key)
{
    validate_key(key);
    const auto meta = options_.quota_bytes ? backend_->head(key) : std::nullopt;
    const bool removed = backend_->remove(key);
    if (removed && meta) {
        std::lock_guard lock(quota_mutex_);
        if (stored_total_) {
            *stored_total_ -= std::min(*stored_total_, meta->stored_length);
        }
    }
    return removed;
}

std::unique_ptr<KeyCursor> ObjectStore::list_keys(const std::string& prefix) { return backend_->list(prefix); }

std::vector<SweepHit> ObjectStore::sweep(const std::string& prefix, SweepPredicate predicate, bool dry_run)
{
    SweepLock lock(options_.lock_dir, prefix);
    std::vector<SweepHit> hits;
    auto cursor = backend_->list(prefix);
    while (auto key = cursor->next()) {
        const auto meta = backend_->head(*key);
        if (!meta) {
            continue;
        }
        switch (predicate) {
        case SweepPredicate::empty:
            if (meta->logical_length == 0) {
                hits.push_back({*key, "empty object"});
            }
            break;
        case SweepPredicate::rate_limited:
            if (meta->logical_length > 0 && matches_any_signature(get(*key), options_.rate_limit_signatures)) {
                hits.push_back({*key, "rate-limit error page"});
            }
            break;
        case SweepPredicate::access_denied:
            if (meta->logical_length > 0 && matches_any_signature(get(*key), options_.access_denied_signatures)) {
                hits.push_back({*key, "access-denied error page"});
            }
            break;
        }
    }
    if (!dry_run) {
        for (const auto& hit : hits) {
            remove(hit.key);
        }
    }
    return hits;
}

StoreStats ObjectStore::stats(const std::string& prefix)
{
    StoreStats stats;
    auto cursor = backend_->list(prefix);
    while (auto key = cursor->next()) {
        if (auto meta = backend_->head(*key)) {
            ++stats.object_count;
            stats.total_stored_bytes += meta->stored_length;
            stats.total_logical_bytes += meta->logical_length;
        }
    }
    return stats;
}

} // namespace edgar
