#include "spectrace/cache.hpp"

#include "spectrace/error.hpp"

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr const char* kSchema = "spectrace-spectrum v1";
constexpr const char* kCodeVersion = "0.1.0";

/// RAII advisory lock on <dir>/<name>.lock. flock() is advisory but all
/// writers in this code base go through SpectrumCache, which is enough to
/// serialize them; readers are safe without locking because writes are
/// atomic renames.
class FileLock {
public:
    explicit FileLock(const std::string& path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0)
            throw CacheError(fmt::format("cannot open lock file '{}': {}", path,
                                         std::strerror(errno)));
        if (::flock(fd_, LOCK_EX) != 0) {
            const int err = errno;
            ::close(fd_);
            throw CacheError(fmt::format("cannot lock '{}': {}", path, std::strerror(err)));
        }
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

double parse_eigenvalue(const std::string& token, const std::string& path) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw CacheError(
            fmt::format("corrupt cache entry '{}': bad eigenvalue '{}'", path, token));
    return v;
}

} // namespace

std::string content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull; // FNV offset basis
    for (unsigned char byte : text) {
        h ^= byte;
        h *= 1099511628211ull; // FNV prime
    }
    return fmt::format("{:016x}", h);
}

SpectrumCache::SpectrumCache(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
        throw CacheError(
            fmt::format("cannot create cache directory '{}': {}", dir_, ec.message()));
    if (!std::filesystem::is_directory(dir_))
        throw CacheError(fmt::format("cache path '{}' is not a directory", dir_));
}

std::string SpectrumCache::entry_path(const std::string& key) const {
    return (std::filesystem::path(dir_) / (content_hash(key) + ".spectrum")).string();
}

std::optional<ClusteredSpectrum> SpectrumCache::load(const std::string& key) const {
    const std::string path = entry_path(key);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;

    std::string line;
    if (!std::getline(in, line))
        return std::nullopt; // empty file: not our schema, treat as a miss
    // Header: "<schema> <hash> version=<v> k_max_reliable=<n> count=<N>"
    std::stringstream header(line);
    std::string word1, word2, hash, version_f, kmax_f, count_f;
    header >> word1 >> word2;
    if (word1 + " " + word2 != kSchema)
        return std::nullopt; // different schema: treat as a miss
    if (!(header >> hash >> version_f >> kmax_f >> count_f))
        throw CacheError(fmt::format("corrupt cache entry '{}': bad header", path));
    if (version_f != fmt::format("version={}", kCodeVersion))
        return std::nullopt; // stale code version: recompute
    if (hash != content_hash(key))
        return std::nullopt; // hash collision on file name: recompute
    if (kmax_f.rfind("k_max_reliable=", 0) != 0 || count_f.rfind("count=", 0) != 0)
        throw CacheError(fmt::format("corrupt cache entry '{}': bad header fields", path));
    const int k_max_reliable =
        std::stoi(kmax_f.substr(std::string("k_max_reliable=").size()));
    const std::size_t count = std::stoul(count_f.substr(std::string("count=").size()));

    ClusteredSpectrum spectrum;
    spectrum.k_max_reliable = k_max_reliable;
    if (!std::getline(in, line) || line.rfind("provenance=", 0) != 0)
        throw CacheError(fmt::format("corrupt cache entry '{}': missing provenance", path));
    spectrum.provenance = line.substr(std::string("provenance=").size());

    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        // "k index lambda"
        std::stringstream row(line);
        int k = 0, index = 0;
        std::string lambda_token;
        if (!(row >> k >> index >> lambda_token))
            throw CacheError(fmt::format("corrupt cache entry '{}': bad row '{}'", path, line));
        auto& cluster = spectrum.clusters[k];
        if (static_cast<int>(cluster.size()) != index)
            throw CacheError(
                fmt::format("corrupt cache entry '{}': out-of-order row '{}'", path, line));
        cluster.push_back(parse_eigenvalue(lambda_token, path));
        ++seen;
    }
    if (seen != count)
        throw CacheError(fmt::format(
            "corrupt cache entry '{}': header count {} but {} rows", path, count, seen));
    return spectrum;
}

void SpectrumCache::store(const std::string& key, const ClusteredSpectrum& spectrum) const {
    const std::string path = entry_path(key);
    FileLock lock(path + ".lock");

    std::size_t count = 0;
    for (const auto& [k, cluster] : spectrum.clusters)
        count += cluster.size();

    std::string body;
    body += fmt::format("{} {} version={} k_max_reliable={} count={}\n", kSchema,
                        content_hash(key), kCodeVersion, spectrum.k_max_reliable, count);
    body += fmt::format("provenance={}\n", spectrum.provenance);
    for (const auto& [k, cluster] : spectrum.clusters)
        for (std::size_t i = 0; i < cluster.size(); ++i)
            body += fmt::format("{} {} {:.17g}\n", k, i, cluster[i]);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw CacheError(fmt::format("cannot write cache temp file '{}'", tmp));
        out << body;
        out.flush();
        if (!out)
            throw CacheError(fmt::format("short write to cache temp file '{}'", tmp));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw CacheError(
            fmt::format("cannot publish cache entry '{}': {}", path, ec.message()));
    }
}

} // namespace spectrace
