#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mergo/errors.hpp"
#include "mergo/weakmeas.hpp"

namespace mergo::io {

namespace fs = std::filesystem;

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written artifact.
inline void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io_error", "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("io_error", "failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("io_error", "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json to_json(const TraceRecord& r) {
    return {{"node_id", r.node_id}, {"iteration", r.iteration}, {"delta", r.delta},
            {"flag", r.flag},       {"p1", r.p1},               {"p_suc_before", r.p_suc_before}};
}

/// One compact JSON object per line.
inline std::string trace_jsonl(const std::vector<TraceRecord>& trace) {
    std::string out;
    for (const auto& r : trace) out += to_json(r).dump() + "\n";
    return out;
}

}  // namespace mergo::io
