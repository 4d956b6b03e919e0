#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "../errors.hpp"
#include "config.hpp"

namespace comblab::experiments {

inline constexpr int csv_schema_version = 1;

struct ExperimentReport {
    std::string name;
    bool pass = false;
    std::map<std::string, double> metrics;
    long rows_written = 0;
    ExperimentConfig config_echo;

    friend bool operator==(const ExperimentReport& a, const ExperimentReport& b)
    {
        return a.name == b.name && a.pass == b.pass && a.metrics == b.metrics &&
               a.rows_written == b.rows_written && nlohmann::json(a.config_echo) == nlohmann::json(b.config_echo);
    }
};

inline void to_json(nlohmann::json& j, const ExperimentReport& r)
{
    j = nlohmann::json{{"name", r.name},
                       {"pass", r.pass},
                       {"metrics", r.metrics},
                       {"rows_written", r.rows_written},
                       {"csv_schema_version", csv_schema_version},
                       {"config_echo", r.config_echo}};
}

inline void from_json(const nlohmann::json& j, ExperimentReport& r)
{
    j.at("name").get_to(r.name);
    j.at("pass").get_to(r.pass);
    j.at("metrics").get_to(r.metrics);
    j.at("rows_written").get_to(r.rows_written);
    r.config_echo = ExperimentConfig{};
    from_json(j.at("config_echo"), r.config_echo);
}

/// Seventeen significant digits, enough to read back the exact double.
inline std::string fmt_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    /// Cells are appended with add() and a row is closed with end_row().
    CsvTable& add(double v) { return add_text(fmt_real(v)); }
    CsvTable& add(long long v) { return add_text(std::to_string(v)); }
    CsvTable& add(int v) { return add_text(std::to_string(v)); }
    CsvTable& add(const std::string& s) { return add_text(s); }
    CsvTable& add(const char* s) { return add_text(s); }

    void end_row()
    {
        if (current_.size() != header_.size()) {
            throw AssertionFailure("CsvTable: row width does not match header");
        }
        rows_.push_back(std::move(current_));
        current_.clear();
    }

    long rows() const { return static_cast<long>(rows_.size()); }

    std::string str() const
    {
        std::string out;
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) {
                    out += ',';
                }
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& row : rows_) {
            line(row);
        }
        return out;
    }

private:
    CsvTable& add_text(std::string s)
    {
        current_.push_back(std::move(s));
        return *this;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> current_;
};

/// Writes through a temporary sibling and renames it into place, so a
/// failure never leaves a partial file at `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
        throw IoFailure("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoFailure("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoFailure("cannot move " + tmp.string() + " into place");
    }
}

inline void write_csv(const ExperimentConfig& cfg, const std::string& file, const CsvTable& table)
{
    write_file_atomic(std::filesystem::path(cfg.out_dir) / file, table.str());
}

inline void write_summary(const std::string& out_dir, const std::vector<ExperimentReport>& reports)
{
    write_file_atomic(std::filesystem::path(out_dir) / "summary.json", nlohmann::json(reports).dump(2) + "\n");
}

} // namespace comblab::experiments
