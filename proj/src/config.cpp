#include "crlab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace crlab::config {

std::string Value::type_name() const {
    switch (v.index()) {
    case 0: return "bool";
    case 1: return "number";
    case 2: return "string";
    default: return "list";
    }
}

namespace {

class LineParser {
public:
    LineParser(const std::string& line, const std::string& origin, int lineno)
        : s_(line), origin_(origin), lineno_(lineno) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(origin_ + ":" + std::to_string(lineno_) + ":" + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }

    bool at_end() {
        skip();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }

    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    std::string name() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-' ||
                s_[pos_] == '.'))
            ++pos_;
        if (pos_ == start) fail("expected a name");
        return s_.substr(start, pos_ - start);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    Value value() {
        const char c = peek();
        if (c == '"') return Value{string()};
        if (c == '[') {
            ++pos_;
            std::vector<Value> items;
            if (peek() == ']') {
                ++pos_;
                return Value{items};
            }
            for (;;) {
                items.push_back(value());
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                expect(']');
                return Value{items};
            }
        }
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            return Value{true};
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            return Value{false};
        }
        const std::size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                    s_[pos_] == 'e' || s_[pos_] == 'E' ||
                                    ((s_[pos_] == '-' || s_[pos_] == '+') && (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
            ++pos_;
        const char* first = s_.data() + start + (s_[start] == '+' ? 1 : 0);
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(first, s_.data() + pos_, d);
        if (pos_ == start || ec != std::errc() || ptr != s_.data() + pos_) {
            pos_ = start;
            fail("expected a value (quoted string, number, true/false or list)");
        }
        return Value{d};
    }

    std::string string() {
        expect('"');
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') {
                ++pos_;
                if (pos_ >= s_.size()) break;
                const char e = s_[pos_];
                if (e == 'n')
                    out += '\n';
                else if (e == 't')
                    out += '\t';
                else if (e == '"' || e == '\\')
                    out += e;
                else
                    fail(std::string("unknown escape \\") + e);
            } else {
                out += s_[pos_];
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    std::size_t pos_ = 0;

private:
    const std::string& s_;
    const std::string& origin_;
    int lineno_;
};

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

} // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        LineParser p(line, origin, lineno);
        if (p.at_end()) continue;
        if (p.peek() == '[') {
            ++p.pos_;
            current = p.name();
            p.expect(']');
            if (!p.at_end()) p.fail("trailing characters after section header");
            cfg.sections_[current];
            continue;
        }
        if (current.empty()) p.fail("key outside of any section");
        const std::string key = p.name();
        p.expect('=');
        Value v = p.value();
        if (!p.at_end()) p.fail("trailing characters after value");
        if (cfg.sections_[current].count(key)) p.fail("duplicate key '" + key + "'");
        cfg.sections_[current][key] = std::move(v);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

bool Config::has_section(const std::string& section) const { return sections_.count(section) != 0; }

const std::map<std::string, Value>* Config::section(const std::string& name) const {
    auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
}

const Value* Config::find(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

void Config::set(const std::string& section, const std::string& key, Value value) {
    sections_[section][key] = std::move(value);
}

namespace {

template <class T>
const T& typed(const Value& v, const std::string& section, const std::string& key, const char* want) {
    if (auto p = std::get_if<T>(&v.v)) return *p;
    throw ConfigError(where(section, key) + ": expected " + want + ", got " + v.type_name());
}

long as_int(const Value& v, const std::string& section, const std::string& key) {
    const double d = typed<double>(v, section, key, "integer");
    if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(where(section, key) + ": expected an integer");
    return static_cast<long>(d);
}

} // namespace

#define CRLAB_MISSING(fallback)                                                                       \
    if (!v) {                                                                                         \
        if (fallback) return *fallback;                                                               \
        throw ConfigError(origin_ + ": missing required key " + where(section, key));                 \
    }

std::string Config::get_string(const std::string& section, const std::string& key,
                               std::optional<std::string> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    return typed<std::string>(*v, section, key, "string");
}

double Config::get_double(const std::string& section, const std::string& key, std::optional<double> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    return typed<double>(*v, section, key, "number");
}

long Config::get_int(const std::string& section, const std::string& key, std::optional<long> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    return as_int(*v, section, key);
}

bool Config::get_bool(const std::string& section, const std::string& key, std::optional<bool> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    return typed<bool>(*v, section, key, "true or false");
}

std::vector<std::string> Config::get_strings(const std::string& section, const std::string& key,
                                             std::optional<std::vector<std::string>> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    std::vector<std::string> out;
    for (const auto& item : typed<std::vector<Value>>(*v, section, key, "list of strings"))
        out.push_back(typed<std::string>(item, section, key, "list of strings"));
    return out;
}

std::vector<long> Config::get_ints(const std::string& section, const std::string& key,
                                   std::optional<std::vector<long>> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    std::vector<long> out;
    for (const auto& item : typed<std::vector<Value>>(*v, section, key, "list of integers"))
        out.push_back(as_int(item, section, key));
    return out;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        std::optional<std::vector<double>> fallback) const {
    const Value* v = find(section, key);
    CRLAB_MISSING(fallback)
    std::vector<double> out;
    for (const auto& item : typed<std::vector<Value>>(*v, section, key, "list of numbers"))
        out.push_back(typed<double>(item, section, key, "list of numbers"));
    return out;
}

#undef CRLAB_MISSING

} // namespace crlab::config
