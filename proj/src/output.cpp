#include "gelation/output.hpp"

#include <cstdint>
#include <cstdio>

namespace gelation {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Cell num_cell(double x) { return {fmt17(x), true}; }
Cell num_cell(long x) { return {std::to_string(x), true}; }
Cell bool_cell(bool b) { return {b ? "true" : "false", true}; }
Cell text_cell(std::string s) { return {std::move(s), false}; }

void RunOutput::meta(const std::string& key, Cell value) {
    config.emplace_back(key, std::move(value));
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out;
}

std::string RunOutput::render_csv() const {
    std::string out;
    out += "# gelation ";
    out += kVersion;
    out += '\n';
    out += "# command: " + command + '\n';
    for (const auto& [key, value] : config) out += "# " + key + ": " + value.text + '\n';
    out += "# seed: " + std::to_string(seed) + '\n';
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i].text;
        }
        out += '\n';
    }
    return out;
}

namespace {

void append_json_value(std::string& out, const Cell& cell) {
    if (cell.bare) {
        out += cell.text;
    } else {
        out += '"';
        out += json_escape(cell.text);
        out += '"';
    }
}

} // namespace

std::string RunOutput::render_json() const {
    std::string out = "{\"version\":\"";
    out += kVersion;
    out += "\",\"command\":\"" + json_escape(command) + "\",\"config\":{";
    for (size_t i = 0; i < config.size(); ++i) {
        if (i) out += ',';
        out += '"' + json_escape(config[i].first) + "\":";
        append_json_value(out, config[i].second);
    }
    out += "},\"seed\":" + std::to_string(seed) + ",\"columns\":[";
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += '"' + json_escape(columns[i]) + '"';
    }
    out += "],\"rows\":[";
    for (size_t r = 0; r < rows.size(); ++r) {
        if (r) out += ',';
        out += '[';
        for (size_t i = 0; i < rows[r].size(); ++i) {
            if (i) out += ',';
            append_json_value(out, rows[r][i]);
        }
        out += ']';
    }
    out += "]}\n";
    return out;
}

} // namespace gelation
