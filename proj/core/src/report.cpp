#include "spectrace/report.hpp"

#include "spectrace/error.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

namespace spectrace {

std::string format_full(double value) { return fmt::format("{:.17g}", value); }

void Report::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}
void Report::add(const std::string& key, double value) {
    entries_.emplace_back(key, format_full(value));
}
void Report::add(const std::string& key, int value) {
    entries_.emplace_back(key, fmt::format("{}", value));
}
void Report::add(const std::string& key, long long value) {
    entries_.emplace_back(key, fmt::format("{}", value));
}
void Report::add_flag(const std::string& key, bool value) {
    entries_.emplace_back(key, value ? "true" : "false");
}

std::string Report::render() const {
    std::string out;
    for (const auto& [key, value] : entries_)
        out += fmt::format("{} = {}\n", key, value);
    return out;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    }
    return out;
}

void atomic_write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(target.parent_path(), ec);
        if (ec)
            throw CacheError(fmt::format("cannot create directory '{}': {}",
                                         target.parent_path().string(), ec.message()));
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw CacheError(fmt::format("cannot write '{}'", tmp));
        out << text;
        out.flush();
        if (!out)
            throw CacheError(fmt::format("short write to '{}'", tmp));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw CacheError(fmt::format("cannot publish '{}': {}", path, ec.message()));
    }
}

} // namespace spectrace
