#pragma once

/// On-disk cache for computed spectra. Entries are versioned plain-text
/// files keyed by a hash of the experiment inputs; writes are atomic
/// (temp file + rename) and serialized through an advisory file lock, so
/// concurrent processes sharing a cache directory never observe a torn
/// entry. A schema or code-version mismatch is treated as a miss, never
/// an error.

#include "spectrace/clusters.hpp"

#include <optional>
#include <string>

namespace spectrace {

/// 64-bit FNV-1a of a byte string, rendered as 16 hex digits.
std::string content_hash(const std::string& text);

class SpectrumCache {
public:
    /// Creates `dir` (and parents) if needed. Throws CacheError when the
    /// directory cannot be created or is not writable.
    explicit SpectrumCache(const std::string& dir);

    /// The cache file path an entry for `key` would use.
    std::string entry_path(const std::string& key) const;

    /// Returns the cached spectrum for `key`, or nullopt on miss (absent
    /// file, schema mismatch, stale code version, or key mismatch). A
    /// structurally corrupt entry throws CacheError naming the file.
    std::optional<ClusteredSpectrum> load(const std::string& key) const;

    /// Atomically stores `spectrum` under `key`, replacing any previous
    /// entry. Eigenvalues round-trip bit-exactly through the text format.
    void store(const std::string& key, const ClusteredSpectrum& spectrum) const;

private:
    std::string dir_;
};

} // namespace spectrace
