#include "singmech/model_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "singmech/errors.hpp"

namespace singmech {

namespace {

class LineParser {
public:
    LineParser(std::string text, std::string origin, int line)
        : s_(std::move(text)), origin_(std::move(origin)), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(origin_ + ":" + std::to_string(line_) + ": " + what);
    }

    void skip_space() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r' || s_[i_] == '\n')) ++i_;
        if (i_ < s_.size() && s_[i_] == '#') {
            while (i_ < s_.size() && s_[i_] != '\n') ++i_;
            skip_space();
        }
    }
    bool at_end() {
        skip_space();
        return i_ >= s_.size();
    }
    char peek() {
        skip_space();
        return i_ < s_.size() ? s_[i_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }

    std::string key() {
        skip_space();
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '-')) {
            ++i_;
        }
        if (start == i_) fail("expected a key");
        return s_.substr(start, i_ - start);
    }

    std::string quoted() {
        expect('"');
        std::string out;
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\n') fail("unterminated string");
            if (s_[i_] == '\\') {
                if (++i_ >= s_.size()) break;
                switch (s_[i_]) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: fail(std::string("unknown escape \\") + s_[i_]);
                }
            } else {
                out += s_[i_];
            }
            ++i_;
        }
        if (i_ >= s_.size()) fail("unterminated string");
        ++i_;
        return out;
    }

    ConfigValue value() {
        ConfigValue v;
        v.line = line_;
        char c = peek();
        if (c == '"') {
            v.type = ConfigValue::Type::string;
            v.text = quoted();
        } else if (c == '[') {
            v.type = ConfigValue::Type::list;
            ++i_;
            if (peek() != ']') {
                for (;;) {
                    v.list.push_back(quoted());
                    if (peek() == ',') {
                        ++i_;
                        if (peek() == ']') break;  // trailing comma
                        continue;
                    }
                    break;
                }
            }
            expect(']');
        } else {
            std::size_t start = i_;
            while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '#') ++i_;
            v.type = ConfigValue::Type::number;
            v.text = s_.substr(start, i_ - start);
            char* end = nullptr;
            v.number = std::strtod(v.text.c_str(), &end);
            if (v.text.empty() || end != v.text.c_str() + v.text.size() || !std::isfinite(v.number)) {
                fail("malformed value '" + v.text + "'");
            }
        }
        return v;
    }

private:
    std::string s_;
    std::string origin_;
    int line_;
    std::size_t i_ = 0;
};

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Bracket depth change of a line, ignoring strings and comments.
int bracket_balance(const std::string& line) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            break;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']') {
            --depth;
        }
    }
    return depth;
}

const ConfigValue* find(const ConfigFile& f, const std::string& section, const std::string& key) {
    auto s = f.find(section);
    if (s == f.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& what) {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

const ConfigValue& require(const ConfigFile& f, const std::string& key, ConfigValue::Type type,
                           const std::string& origin) {
    const ConfigValue* v = find(f, "", key);
    if (v == nullptr) throw ParseError(origin + ": missing key '" + key + "'");
    if (v->type != type) fail_at(origin, v->line, "wrong type for '" + key + "'");
    return *v;
}

void reject_unknown(const ConfigFile& f, const std::map<std::string, std::vector<std::string>>& allowed,
                    const std::string& origin) {
    for (const auto& [section, keys] : f) {
        auto a = allowed.find(section);
        if (a == allowed.end()) {
            throw ParseError(origin + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : keys) {
            if (a->second.empty()) continue;  // free-form section
            bool ok = false;
            for (const auto& k : a->second) ok = ok || k == key;
            if (!ok) fail_at(origin, value.line, "unknown key '" + key + "'");
        }
    }
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

}  // namespace

ConfigFile parse_config(std::istream& in, const std::string& origin) {
    ConfigFile out;
    out[""];
    std::string section;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const int first = number;
        std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        if (t[0] == '[') {
            auto close = t.find(']');
            if (close == std::string::npos) fail_at(origin, number, "unterminated section header");
            std::string rest = strip(t.substr(close + 1));
            if (!rest.empty() && rest[0] != '#') fail_at(origin, number, "text after section header");
            section = strip(t.substr(1, close - 1));
            if (section.empty()) fail_at(origin, number, "empty section name");
            if (out.count(section) != 0 && !out[section].empty()) {
                fail_at(origin, number, "duplicate section [" + section + "]");
            }
            out[section];
            continue;
        }
        // A list may continue over several lines.
        int depth = bracket_balance(line);
        std::string text = line;
        while (depth > 0 && std::getline(in, line)) {
            ++number;
            depth += bracket_balance(line);
            text += "\n" + line;
        }
        LineParser p(text, origin, first);
        std::string key = p.key();
        p.expect('=');
        ConfigValue v = p.value();
        if (!p.at_end()) p.fail("unexpected text after value");
        if (!out[section].emplace(key, std::move(v)).second) p.fail("duplicate key '" + key + "'");
    }
    return out;
}

LagrangianModel ModelFile::model() const {
    return LagrangianModel(name, coordinates, lagrangian, parameters);
}

ModelFile read_model_file(std::istream& in, const std::string& origin) {
    ConfigFile f = parse_config(in, origin);
    reject_unknown(f, {{"", {"name", "coordinates", "lagrangian"}}, {"parameters", {}}, {"sampling", {"seed", "samples", "threshold"}}},
                   origin);
    ModelFile m;
    m.name = require(f, "name", ConfigValue::Type::string, origin).text;
    m.coordinates = require(f, "coordinates", ConfigValue::Type::list, origin).list;
    m.lagrangian = require(f, "lagrangian", ConfigValue::Type::string, origin).text;
    if (auto it = f.find("parameters"); it != f.end()) {
        for (const auto& [key, v] : it->second) {
            if (v.type != ConfigValue::Type::number) fail_at(origin, v.line, "parameter '" + key + "' must be a number");
            m.parameters.emplace(key, v.number);
        }
    }
    auto integer = [&](const ConfigValue& v, const char* key) {
        if (v.type != ConfigValue::Type::number || v.number < 0 || v.number != std::floor(v.number) ||
            v.number > 9.0e15) {
            fail_at(origin, v.line, std::string("'") + key + "' must be a non-negative integer");
        }
        return v.number;
    };
    if (const ConfigValue* v = find(f, "sampling", "seed")) m.seed = static_cast<std::uint64_t>(integer(*v, "seed"));
    if (const ConfigValue* v = find(f, "sampling", "samples")) {
        m.samples = static_cast<int>(integer(*v, "samples"));
        if (*m.samples < 1 || *m.samples > 100000) fail_at(origin, v->line, "'samples' out of range");
    }
    if (const ConfigValue* v = find(f, "sampling", "threshold")) {
        if (v->type != ConfigValue::Type::number || !(v->number > 0.0)) {
            fail_at(origin, v->line, "'threshold' must be a positive number");
        }
        m.threshold = v->number;
    }
    return m;
}

ModelFile load_model_file(const std::string& path) {
    auto in = open(path);
    return read_model_file(in, path);
}

LagrangianModel load_model(const std::string& path) { return load_model_file(path).model(); }

HamiltonianFile read_hamiltonian_file(std::istream& in, const std::string& origin) {
    ConfigFile f = parse_config(in, origin);
    reject_unknown(f, {{"", {"name", "canonical", "times", "hamiltonians"}}}, origin);
    HamiltonianFile h;
    h.name = require(f, "name", ConfigValue::Type::string, origin).text;
    h.canonical = require(f, "canonical", ConfigValue::Type::list, origin).list;
    h.times = require(f, "times", ConfigValue::Type::list, origin).list;
    h.hamiltonians = require(f, "hamiltonians", ConfigValue::Type::list, origin).list;
    if (h.times.size() != h.hamiltonians.size()) {
        throw ParseError(origin + ": " + std::to_string(h.times.size()) + " times but " +
                         std::to_string(h.hamiltonians.size()) + " hamiltonians");
    }
    return h;
}

HamiltonianFile load_hamiltonian_file(const std::string& path) {
    auto in = open(path);
    return read_hamiltonian_file(in, path);
}

bool is_hamiltonian_file(const std::string& path) {
    auto in = open(path);
    ConfigFile f = parse_config(in, path);
    return find(f, "", "hamiltonians") != nullptr;
}

}  // namespace singmech
