#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iftnet/common.hpp"

namespace iftnet {

inline std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n'))
        ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n'))
        --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_line(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep))
        out.push_back(trim(field));
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line_number = 0;
};

// Reads a header-checked CSV. Lines starting with '#' carry artifact
// metadata (producing stage, config hash) and are skipped, as are blanks.
inline std::vector<CsvRow> read_csv(const std::string& path,
                                    const std::vector<std::string>& expected_header)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path + "'");
    std::vector<CsvRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto fields = split_line(t);
        if (!header_seen) {
            if (fields != expected_header) {
                std::string want;
                for (std::size_t i = 0; i < expected_header.size(); ++i)
                    want += (i ? "," : "") + expected_header[i];
                throw io_error(path + ":" + std::to_string(line_no) +
                               ": bad header, expected '" + want + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != expected_header.size())
            throw io_error(path + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(expected_header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        rows.push_back({std::move(fields), line_no});
    }
    if (!header_seen)
        throw io_error(path + ": missing header row");
    return rows;
}

inline double parse_double(const std::string& s, const std::string& context)
{
    if (s.empty())
        throw io_error(context + ": empty numeric field");
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw io_error(context + ": not a number: '" + s + "'");
    }
    if (used != s.size())
        throw io_error(context + ": trailing junk in number: '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const std::string& context)
{
    if (s.empty())
        throw io_error(context + ": empty integer field");
    std::size_t used = 0;
    long long v;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw io_error(context + ": not an integer: '" + s + "'");
    }
    if (used != s.size())
        throw io_error(context + ": trailing junk in integer: '" + s + "'");
    return v;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path)
    {
        if (!out_)
            throw io_error("cannot write '" + path + "'");
        path_ = path;
    }

    // metadata comment naming the producing stage; keeps artifacts self-describing
    void stage_comment(const std::string& stage, const std::string& config_hash)
    {
        out_ << "# stage=" << stage << " config_hash=" << config_hash << "\n";
    }

    void raw_line(const std::string& line) { out_ << line << "\n"; }

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out_ << (i ? "," : "") << fields[i];
        out_ << "\n";
    }

    void close()
    {
        out_.close();
        if (!out_)
            throw io_error("error writing '" + path_ + "'");
    }

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace iftnet
