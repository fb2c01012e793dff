#pragma once

/// Deterministic text reports. A Report is an insertion-ordered list of
/// dotted keys with string, integer, or full-precision floating-point
/// values, rendered one `key = value` per line. CSV tables follow RFC 4180
/// (comma separator, '.' decimal point, header row, quoting only when a
/// field requires it). Given identical inputs the rendered bytes are
/// identical regardless of thread count.

#include <string>
#include <vector>

namespace spectrace {

class Report {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);      ///< {:.17g}
    void add(const std::string& key, int value);
    void add(const std::string& key, long long value);
    void add_flag(const std::string& key, bool value);   ///< true/false

    /// Renders `key = value` lines in insertion order.
    std::string render() const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// One CSV cell, quoted per RFC 4180 when it contains a comma, quote, or
/// newline.
std::string csv_escape(const std::string& field);

/// Renders rows (the first row is the header) as CRLF-free RFC 4180 text
/// with a trailing newline.
std::string render_csv(const std::vector<std::vector<std::string>>& rows);

/// Writes text to `path` atomically (temp file in the same directory +
/// rename). Creates parent directories. Throws CacheError on I/O failure.
void atomic_write_text(const std::string& path, const std::string& text);

/// Formats a double exactly as report/CSV cells do ({:.17g}).
std::string format_full(double value);

} // namespace spectrace
