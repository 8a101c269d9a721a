#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iftnet/common.hpp"

namespace iftnet {

// Production-chain segments: segment name -> set of SITC product codes.
// Codes must be disjoint across segments so every trade row resolves to
// exactly one segment.
class SegmentConfig {
public:
    SegmentConfig() = default;

    explicit SegmentConfig(std::map<std::string, std::set<std::string>> segments)
        : segments_(std::move(segments))
    {
        validate();
    }

    const std::map<std::string, std::set<std::string>>& segments() const { return segments_; }

    bool has_segment(const std::string& name) const { return segments_.count(name) > 0; }

    const std::set<std::string>& codes(const std::string& name) const
    {
        auto it = segments_.find(name);
        if (it == segments_.end())
            throw validation_error("unknown segment '" + name + "'");
        return it->second;
    }

    std::vector<std::string> segment_names() const
    {
        std::vector<std::string> out;
        for (const auto& [name, _] : segments_)
            out.push_back(name);
        return out;
    }

    std::optional<std::string> segment_of(const std::string& code) const
    {
        for (const auto& [name, codes] : segments_)
            if (codes.count(code))
                return name;
        return std::nullopt;
    }

    std::set<std::string> all_codes() const
    {
        std::set<std::string> out;
        for (const auto& [_, codes] : segments_)
            out.insert(codes.begin(), codes.end());
        return out;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [name, codes] : segments_)
            j[name] = std::vector<std::string>(codes.begin(), codes.end());
        return j;
    }

private:
    void validate() const
    {
        std::map<std::string, std::string> owner;
        for (const auto& [name, codes] : segments_) {
            if (codes.empty())
                throw validation_error("segment '" + name + "' has no product codes");
            for (const auto& code : codes) {
                auto [it, inserted] = owner.emplace(code, name);
                if (!inserted)
                    throw validation_error("product code '" + code + "' appears in segments '" +
                                           it->second + "' and '" + name + "'");
            }
        }
        if (segments_.empty())
            throw validation_error("segment config is empty");
    }

    std::map<std::string, std::set<std::string>> segments_;
};

// The shipped automotive component groups. Code ranges in the source table
// (76211-76212, 71321-71322, 6251-62551) enumerate the listed endpoint
// codes, so they are stored expanded.
inline SegmentConfig default_segment_config()
{
    return SegmentConfig({
        {"Electrical Parts", {"76211", "76212", "77812", "77823"}},
        {"Engines & Parts", {"71321", "71322", "71323", "77831", "77833", "77834"}},
        {"Rubber & Metal Parts",
         {"6251", "62551", "62559", "62591", "62592", "62593", "62594", "69915", "69961"}},
    });
}

inline SegmentConfig load_segment_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open segment config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw io_error("segment config '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw validation_error("segment config '" + path + "': expected an object of "
                               "segment name -> code list");
    std::map<std::string, std::set<std::string>> segments;
    for (const auto& [name, codes] : j.items()) {
        if (!codes.is_array())
            throw validation_error("segment '" + name + "': codes must be an array");
        std::set<std::string> set;
        for (const auto& c : codes) {
            if (!c.is_string())
                throw validation_error("segment '" + name + "': codes must be strings");
            const std::string code = c.get<std::string>();
            if (code.empty())
                throw validation_error("segment '" + name + "': empty product code");
            if (!set.insert(code).second)
                throw validation_error("segment '" + name + "': duplicate code '" + code + "'");
        }
        segments.emplace(name, std::move(set));
    }
    return SegmentConfig(std::move(segments));
}

inline void save_segment_config(const SegmentConfig& cfg, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot write segment config '" + path + "'");
    out << cfg.to_json().dump(2) << "\n";
}

} // namespace iftnet
