#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "edgar/digest.hpp"
#include "edgar/error.hpp"
#include "edgar/object_store.hpp"

namespace edgar {

namespace fs = std::filesystem;

namespace {

bool is_shard_name(std::string_view name)
{
    return name.size() == 2 && std::all_of(name.begin(), name.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

// Relative on-disk path for a key: a trailing SHA-1 segment gets a two-character
// shard directory in front of it.
fs::path relative_path(const std::string& key)
{
    const auto slash = key.rfind('/');
    const std::string_view last = slash == std::string::npos ? std::string_view(key) : std::string_view(key).substr(slash + 1);
    fs::path path = slash == std::string::npos ? fs::path() : fs::path(key.substr(0, slash));
    if (is_sha1_hex(last)) {
        path /= std::string(last.substr(0, 2));
    }
    return path / std::string(last);
}

std::string read_file(const fs::path& path, std::optional<ByteRange> range)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::StorageFailure, "cannot open " + path.string());
    }
    if (!range) {
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return std::move(buffer).str();
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::uint64_t>(in.tellg());
    if (range->begin >= size) {
        return {};
    }
    const auto length = std::min(range->end, size) - range->begin;
    std::string out(length, '\0');
    in.seekg(static_cast<std::streamoff>(range->begin));
    in.read(out.data(), static_cast<std::streamsize>(length));
    out.resize(static_cast<std::size_t>(in.gcount()));
    return out;
}

struct Entry {
    std::string full;   // key, or key prefix ending in '/'
    fs::path path;
    enum class Kind { file, dir, shard_rest } kind;
};

bool prefix_compatible(const std::string& full, const std::string& prefix)
{
    return full.starts_with(prefix) || prefix.starts_with(full);
}

class FsCursor final : public KeyCursor {
public:
    FsCursor(fs::path objects, std::string prefix) : prefix_(std::move(prefix))
    {
        if (fs::is_directory(objects)) {
            stack_.push_back(expand({"", std::move(objects), Entry::Kind::dir}));
        }
    }

    std::optional<std::string> next() override
    {
        while (!stack_.empty()) {
            auto& frame = stack_.back();
            if (frame.index >= frame.entries.size()) {
                stack_.pop_back();
                continue;
            }
            Entry entry = std::move(frame.entries[frame.index++]);
            if (!prefix_compatible(entry.full, prefix_)) {
                continue;
            }
            if (entry.kind == Entry::Kind::file) {
                if (entry.full.starts_with(prefix_)) {
                    return entry.full;
                }
                continue;
            }
            stack_.push_back(expand(entry));
        }
        return std::nullopt;
    }

private:
    struct Frame {
        std::vector<Entry> entries;
        std::size_t index = 0;
    };

    static Frame expand(const Entry& dir)
    {
        Frame frame;
        std::error_code ec;
        for (fs::directory_iterator it(dir.path, ec), end; !ec && it != end; it.increment(ec)) {
            const auto name = it->path().filename().string();
            const bool is_dir = it->is_directory();
            if (dir.kind == Entry::Kind::shard_rest && !is_dir && is_sha1_hex(name) &&
                name.starts_with(dir.path.filename().string())) {
                continue;   // lifted into the parent listing
            }
            if (!is_dir) {
                frame.entries.push_back({dir.full + name, it->path(), Entry::Kind::file});
                continue;
            }
            if (dir.kind == Entry::Kind::dir && is_shard_name(name)) {
                bool has_rest = false;
                std::error_code inner;
                for (fs::directory_iterator sub(it->path(), inner), send; !inner && sub != send; sub.increment(inner)) {
                    const auto sub_name = sub->path().filename().string();
                    if (!sub->is_directory() && is_sha1_hex(sub_name) && sub_name.starts_with(name)) {
                        frame.entries.push_back({dir.full + sub_name, sub->path(), Entry::Kind::file});
                    } else {
                        has_rest = true;
                    }
                }
                if (has_rest) {
                    frame.entries.push_back({dir.full + name + "/", it->path(), Entry::Kind::shard_rest});
                }
                continue;
            }
            frame.entries.push_back({dir.full + name + "/", it->path(), Entry::Kind::dir});
        }
        std::sort(frame.entries.begin(), frame.entries.end(),
                  [](const Entry& a, const Entry& b) { return a.full < b.full; });
        return frame;
    }

    std::string prefix_;
    std::vector<Frame> stack_;
};

class FilesystemBackend final : public StorageBackend {
public:
    explicit FilesystemBackend(fs::path root)
        : root_(std::move(root)), objects_(root_ / "objects"), meta_(root_ / "meta"), tmp_(root_ / "tmp")
    {
        try {
            fs::create_directories(objects_);
            fs::create_directories(meta_);
            fs::create_directories(tmp_);
        } catch (const fs::filesystem_error& e) {
            throw Error(ErrorCode::BackendUnavailable, e.what());
        }
    }

    void write(const std::string& key, std::string_view stored, const ObjectMeta& meta) override
    {
        const auto rel = relative_path(key);
        const nlohmann::json sidecar = {{"compressed", meta.compressed},
                                        {"stored_length", meta.stored_length},
                                        {"logical_length", meta.logical_length},
                                        {"sha1", meta.sha1}};
        atomic_write(objects_ / rel, stored);
        atomic_write(meta_ / sidecar_name(rel), sidecar.dump());
    }

    std::optional<ObjectMeta> head(const std::string& key) override
    {
        const auto rel = relative_path(key);
        std::error_code ec;
        if (!fs::is_regular_file(meta_ / sidecar_name(rel), ec) || !fs::is_regular_file(objects_ / rel, ec)) {
            return std::nullopt;
        }
        try {
            const auto json = nlohmann::json::parse(read_file(meta_ / sidecar_name(rel), std::nullopt));
            ObjectMeta meta;
            meta.compressed = json.at("compressed").get<bool>();
            meta.stored_length = json.at("stored_length").get<std::uint64_t>();
            meta.logical_length = json.at("logical_length").get<std::uint64_t>();
            meta.sha1 = json.at("sha1").get<std::string>();
            return meta;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::CorruptObject, "metadata for '" + key + "' is unreadable: " + e.what());
        }
    }

    std::optional<std::string> read(const std::string& key, std::optional<ByteRange> range) override
    {
        const auto path = objects_ / relative_path(key);
        std::error_code ec;
        if (!fs::is_regular_file(path, ec)) {
            return std::nullopt;
        }
        return read_file(path, range);
    }

    bool remove(const std::string& key) override
    {
        const auto rel = relative_path(key);
        std::error_code ec;
        const bool had_meta = fs::remove(meta_ / sidecar_name(rel), ec);
        const bool had_object = fs::remove(objects_ / rel, ec);
        prune_empty_parents((objects_ / rel).parent_path(), objects_);
        prune_empty_parents((meta_ / rel).parent_path(), meta_);
        return had_meta || had_object;
    }

    std::unique_ptr<KeyCursor> list(const std::string& prefix) override
    {
        return std::make_unique<FsCursor>(objects_, prefix);
    }

    std::string describe() const override { return "filesystem:" + root_.string(); }

private:
    static fs::path sidecar_name(const fs::path& rel)
    {
        auto name = rel;
        name += ".json";
        return name;
    }

    static void prune_empty_parents(fs::path dir, const fs::path& stop)
    {
        std::error_code ec;
        while (dir != stop && dir.string().size() > stop.string().size() && fs::is_empty(dir, ec) && !ec) {
            fs::remove(dir, ec);
            dir = dir.parent_path();
        }
    }

    void atomic_write(const fs::path& target, std::string_view bytes)
    {
        static std::atomic<std::uint64_t> counter{0};
        std::ostringstream name;
        name << "w" << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "-" << counter.fetch_add(1) << ".tmp";
        const auto temp = tmp_ / name.str();
        try {
            fs::create_directories(target.parent_path());
            {
                std::ofstream out(temp, std::ios::binary | std::ios::trunc);
                out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
                if (!out) {
                    throw Error(ErrorCode::StorageFailure, "short write to " + temp.string());
                }
            }
            fs::rename(temp, target);
        } catch (const fs::filesystem_error& e) {
            std::error_code ec;
            fs::remove(temp, ec);
            throw Error(ErrorCode::StorageFailure, e.what());
        }
    }

    fs::path root_;
    fs::path objects_;
    fs::path meta_;
    fs::path tmp_;
};

} // namespace

std::unique_ptr<StorageBackend> make_filesystem_backend(const fs::path& root)
{
    return std::make_unique<FilesystemBackend>(root);
}

} // namespace edgar
