// keyvalue.hpp — line-oriented "key = value" documents with [section]
// headers, bracketed numeric lists and '#' comments.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gaudin {

struct KvEntry {
    std::string key;
    std::string value;  // trimmed raw text
    std::size_t line{0};
    std::size_t column{0};  // 1-based column of the value

    bool is_list() const { return !value.empty() && value.front() == '['; }
};

struct KvSection {
    std::string name;  // empty for the leading unnamed section
    std::vector<KvEntry> entries;

    const KvEntry* find(const std::string& key) const;
    bool has(const std::string& key) const { return find(key) != nullptr; }

    // Typed accessors; conversion failures raise ParseError at the value.
    const KvEntry& at(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<long long> get_ints(const std::string& key) const;
};

class KvDocument {
public:
    static KvDocument parse(const std::string& text);
    static KvDocument read_file(const std::string& path);

    const std::vector<KvSection>& sections() const noexcept { return sections_; }
    const KvSection* section(const std::string& name) const;
    const KvSection& require_section(const std::string& name) const;

private:
    std::vector<KvSection> sections_;
};

// Writer with fixed %.17g formatting so identical values give identical bytes.
class KvWriter {
public:
    KvWriter& comment(const std::string& text);
    KvWriter& section(const std::string& name);
    KvWriter& put(const std::string& key, const std::string& value);
    KvWriter& put(const std::string& key, double value);
    KvWriter& put(const std::string& key, long long value);
    KvWriter& put(const std::string& key, int value) { return put(key, static_cast<long long>(value)); }
    KvWriter& put(const std::string& key, const std::vector<double>& values);
    KvWriter& put(const std::string& key, const std::vector<int>& values);

    const std::string& str() const noexcept { return out_; }

private:
    std::string out_;
};

std::string format_double(double v);

}  // namespace gaudin
