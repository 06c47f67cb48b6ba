#include "gaudin/keyvalue.hpp"

#include "gaudin/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gaudin {

namespace {

std::size_t skip_space(const std::string& s, std::size_t i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return i;
}

std::string rtrim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
    }
    return true;
}

double to_double(const std::string& text, std::size_t line, std::size_t column) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    if (!text.empty() && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || text.empty()) {
        throw ParseError("expected a number, got '" + text + "'", line, column);
    }
    return v;
}

long long to_int(const std::string& text, std::size_t line, std::size_t column) {
    long long v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    if (!text.empty() && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || text.empty()) {
        throw ParseError("expected an integer, got '" + text + "'", line, column);
    }
    return v;
}

// Splits "[a, b, c]" into trimmed items with their columns.
std::vector<std::pair<std::string, std::size_t>> split_list(const KvEntry& e) {
    const std::string& v = e.value;
    if (!e.is_list() || v.back() != ']') {
        throw ParseError("expected a bracketed list", e.line, e.column);
    }
    std::vector<std::pair<std::string, std::size_t>> items;
    const std::string inner = v.substr(1, v.size() - 2);
    if (inner.find_first_not_of(" \t") == std::string::npos) return items;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = inner.find(',', start);
        const std::string piece = inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const std::size_t lead = skip_space(piece, 0);
        const std::string item = rtrim(piece.substr(lead));
        const std::size_t col = e.column + 1 + start + lead;
        if (item.empty()) throw ParseError("empty list item", e.line, col);
        items.emplace_back(item, col);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

}  // namespace

const KvEntry* KvSection::find(const std::string& key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

const KvEntry& KvSection::at(const std::string& key) const {
    const KvEntry* e = find(key);
    if (!e) {
        throw ValidationError("missing required key '" + key + "'" + (name.empty() ? "" : " in [" + name + "]"));
    }
    return *e;
}

std::string KvSection::get_string(const std::string& key) const { return at(key).value; }

double KvSection::get_double(const std::string& key) const {
    const auto& e = at(key);
    return to_double(e.value, e.line, e.column);
}

long long KvSection::get_int(const std::string& key) const {
    const auto& e = at(key);
    return to_int(e.value, e.line, e.column);
}

std::vector<double> KvSection::get_doubles(const std::string& key) const {
    const auto& e = at(key);
    std::vector<double> out;
    for (const auto& [item, col] : split_list(e)) out.push_back(to_double(item, e.line, col));
    return out;
}

std::vector<long long> KvSection::get_ints(const std::string& key) const {
    const auto& e = at(key);
    std::vector<long long> out;
    for (const auto& [item, col] : split_list(e)) out.push_back(to_int(item, e.line, col));
    return out;
}

KvDocument KvDocument::parse(const std::string& text) {
    KvDocument doc;
    doc.sections_.push_back({});
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = raw.substr(0, raw.find('#'));
        const std::size_t first = skip_space(line, 0);
        if (first == line.size()) continue;
        line = rtrim(line);
        const std::size_t eq = line.find('=');
        if (line[first] == '[' && eq == std::string::npos) {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no, line.size() + 1);
            const std::string name = rtrim(line.substr(first + 1, line.size() - first - 2));
            const std::size_t lead = skip_space(name, 0);
            if (!valid_key(name.substr(lead))) throw ParseError("invalid section name", line_no, first + 2);
            for (const auto& s : doc.sections_) {
                if (s.name == name.substr(lead)) throw ParseError("duplicate section [" + s.name + "]", line_no, first + 1);
            }
            doc.sections_.push_back({name.substr(lead), {}});
            continue;
        }
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, first + 1);
        const std::string key = rtrim(line.substr(first, eq - first));
        if (!valid_key(key)) throw ParseError("invalid key '" + key + "'", line_no, first + 1);
        const std::size_t vstart = skip_space(line, eq + 1);
        if (vstart >= line.size()) throw ParseError("missing value for '" + key + "'", line_no, eq + 2);
        std::string value = line.substr(vstart);
        if (value.front() == '[' && value.back() != ']') {
            throw ParseError("unterminated list", line_no, line.size() + 1);
        }
        if (value.front() != '[' && value.find_first_of("[]") != std::string::npos) {
            throw ParseError("unexpected bracket in value", line_no, vstart + 1 + value.find_first_of("[]"));
        }
        auto& sec = doc.sections_.back();
        if (sec.has(key)) throw ParseError("duplicate key '" + key + "'", line_no, first + 1);
        sec.entries.push_back({key, value, line_no, vstart + 1});
    }
    return doc;
}

KvDocument KvDocument::read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

const KvSection* KvDocument::section(const std::string& name) const {
    for (const auto& s : sections_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const KvSection& KvDocument::require_section(const std::string& name) const {
    const KvSection* s = section(name);
    if (!s) throw ValidationError("missing section [" + name + "]");
    return *s;
}

std::string format_double(double v) {
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

KvWriter& KvWriter::comment(const std::string& text) {
    out_ += "# " + text + "\n";
    return *this;
}

KvWriter& KvWriter::section(const std::string& name) {
    out_ += "[" + name + "]\n";
    return *this;
}

KvWriter& KvWriter::put(const std::string& key, const std::string& value) {
    out_ += key + " = " + value + "\n";
    return *this;
}

KvWriter& KvWriter::put(const std::string& key, double value) { return put(key, format_double(value)); }

KvWriter& KvWriter::put(const std::string& key, long long value) { return put(key, std::to_string(value)); }

KvWriter& KvWriter::put(const std::string& key, const std::vector<double>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + format_double(values[i]);
    return put(key, s + "]");
}

KvWriter& KvWriter::put(const std::string& key, const std::vector<int>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + std::to_string(values[i]);
    return put(key, s + "]");
}

}  // namespace gaudin
