#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gelation {

inline constexpr const char* kVersion = "0.1.0";

// %.17g in the C locale: every double round-trips and reruns are
// byte-identical. Not the shortest representation on purpose.
std::string fmt17(double x);

// One table cell or config value: preformatted text plus whether JSON may
// emit it bare (numbers, booleans) or must quote it.
struct Cell {
    std::string text;
    bool bare = false;
};

Cell num_cell(double x);
Cell num_cell(long x);
Cell bool_cell(bool b);
Cell text_cell(std::string s);

// Everything a run emits: the config echo in flag order, then one table.
// Renders as CSV with '#'-prefixed provenance comments or as a single
// top-level JSON object; both carry (version, command, config, seed).
struct RunOutput {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Cell>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void meta(const std::string& key, Cell value);
    std::string render_csv() const;
    std::string render_json() const;
};

std::string json_escape(const std::string& s);

} // namespace gelation
