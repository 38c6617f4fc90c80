#pragma once

// Session registry for the click-to-segment workflow, independent of transport.

#include <pats/image_io.hpp>
#include <pats/pipeline.hpp>
#include <pats/selection.hpp>
#include <pats/tree_io.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>

namespace pats {

class SessionNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ServiceOptions {
    std::chrono::seconds session_ttl{1800};
    PipelineOptions pipeline{};
    /// When set, trees are persisted as <image_id>.pats sidecars and reloaded on reopen.
    std::string tree_cache_dir;
};

/// FNV-1a over the encoded image bytes, as 16 hex digits.
inline std::string content_id(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return out;
}

class SelectionService {
public:
    using Clock = std::chrono::steady_clock;

    /// Entry plus its lock; operations on one session are serialized through `mutex`.
    struct Handle {
        std::mutex mutex;
        SelectionSession session;
        Clock::time_point last_used;

        Handle(std::shared_ptr<const Segmentation> seg, std::string image_id)
            : session(std::move(seg), std::move(image_id)), last_used(Clock::now())
        {
        }
    };

    struct Opened {
        std::string session_id;
        std::shared_ptr<Handle> handle;
    };

    explicit SelectionService(ServiceOptions options = {}) : options_(std::move(options)) {}

    const ServiceOptions& options() const noexcept { return options_; }

    /// Decodes, segments and registers a new session. Throws ImageDecodeError.
    Opened open_session(std::string_view encoded_image)
    {
        const ColorImage img = decode_color_image(encoded_image);
        const std::string image_id = content_id(encoded_image);
        return open_session(img, image_id);
    }

    Opened open_session(const ColorImage& img, const std::string& image_id)
    {
        auto seg = std::make_shared<const Segmentation>(tree_for(img, image_id));
        auto handle = std::make_shared<Handle>(std::move(seg), image_id);
        std::lock_guard lock(mutex_);
        evict_expired_locked();
        std::string id = new_id_locked();
        sessions_.emplace(id, handle);
        return {id, handle};
    }

    /// Looks up a live session and refreshes its idle timer.
    std::shared_ptr<Handle> find(const std::string& id)
    {
        std::lock_guard lock(mutex_);
        evict_expired_locked();
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw SessionNotFound("unknown or expired session " + id);
        it->second->last_used = Clock::now();
        return it->second;
    }

    bool close(const std::string& id)
    {
        std::lock_guard lock(mutex_);
        return sessions_.erase(id) > 0;
    }

    std::size_t size()
    {
        std::lock_guard lock(mutex_);
        evict_expired_locked();
        return sessions_.size();
    }

private:
    PartitionTree tree_for(const ColorImage& img, const std::string& image_id)
    {
        if (options_.tree_cache_dir.empty()) return build_partition_tree(img, options_.pipeline);
        const auto path = std::filesystem::path(options_.tree_cache_dir) / (image_id + ".pats");
        if (std::filesystem::exists(path)) {
            try {
                PartitionTree t = load_tree(path.string());
                if (t.width == img.width() && t.height == img.height()) return t;
            } catch (const std::exception&) {
                // Rebuild below.
            }
        }
        PartitionTree t = build_partition_tree(img, options_.pipeline);
        std::error_code ec;
        std::filesystem::create_directories(options_.tree_cache_dir, ec);
        try {
            save_tree(path.string(), t);
        } catch (const std::exception&) {
            // Cache is best effort.
        }
        return t;
    }

    void evict_expired_locked()
    {
        const auto now = Clock::now();
        std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_used > options_.session_ttl; });
    }

    std::string new_id_locked()
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::uniform_int_distribution<int> nibble(0, 15);
        std::string id;
        do {
            id.assign(32, '0');
            for (auto& c : id) c = digits[nibble(rng_)];
        } while (sessions_.count(id));
        return id;
    }

    ServiceOptions options_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Handle>> sessions_;
    std::mt19937_64 rng_{std::random_device{}()};
};

} // namespace pats
