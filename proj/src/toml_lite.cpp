#include "catmzi/toml_lite.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "catmzi/errors.hpp"

namespace catmzi {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("toml line " + std::to_string(line) + ": " + msg);
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }
    void skip_ws() {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t'))
            ++pos;
    }
};

std::string parse_basic_string(Cursor& c) {
    ++c.pos; // opening quote
    std::string out;
    for (;;) {
        if (c.done())
            c.fail("unterminated string");
        const char ch = c.s[c.pos++];
        if (ch == '"')
            return out;
        if (ch != '\\') {
            out += ch;
            continue;
        }
        if (c.done())
            c.fail("unterminated escape");
        const char e = c.s[c.pos++];
        switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'u': {
            if (c.pos + 4 > c.s.size())
                c.fail("truncated \\u escape");
            unsigned code = 0;
            for (int k = 0; k < 4; ++k) {
                const char h = c.s[c.pos++];
                code <<= 4;
                if (h >= '0' && h <= '9')
                    code |= static_cast<unsigned>(h - '0');
                else if (h >= 'a' && h <= 'f')
                    code |= static_cast<unsigned>(h - 'a' + 10);
                else if (h >= 'A' && h <= 'F')
                    code |= static_cast<unsigned>(h - 'A' + 10);
                else
                    c.fail("bad \\u escape");
            }
            if (code < 0x80) {
                out += static_cast<char>(code);
            } else if (code < 0x800) {
                out += static_cast<char>(0xC0 | (code >> 6));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else {
                out += static_cast<char>(0xE0 | (code >> 12));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
            break;
        }
        default:
            c.fail("unknown escape");
        }
    }
}

std::string parse_literal_string(Cursor& c) {
    ++c.pos;
    std::string out;
    for (;;) {
        if (c.done())
            c.fail("unterminated string");
        const char ch = c.s[c.pos++];
        if (ch == '\'')
            return out;
        out += ch;
    }
}

bool bare_key_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
           ch == '-';
}

std::vector<std::string> parse_key_path(Cursor& c) {
    std::vector<std::string> path;
    for (;;) {
        c.skip_ws();
        if (c.peek() == '"') {
            path.push_back(parse_basic_string(c));
        } else if (c.peek() == '\'') {
            path.push_back(parse_literal_string(c));
        } else {
            std::string k;
            while (!c.done() && bare_key_char(c.peek()))
                k += c.s[c.pos++];
            if (k.empty())
                c.fail("expected a key");
            path.push_back(std::move(k));
        }
        c.skip_ws();
        if (c.peek() == '.') {
            ++c.pos;
            continue;
        }
        return path;
    }
}

void insert_path(nlohmann::json& table, const std::vector<std::string>& path,
                 nlohmann::json value, const Cursor& c) {
    nlohmann::json* t = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto& slot = (*t)[path[i]];
        if (slot.is_null())
            slot = nlohmann::json::object();
        if (!slot.is_object())
            c.fail("key '" + path[i] + "' is not a table");
        t = &slot;
    }
    if (t->contains(path.back()))
        c.fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = std::move(value);
}

nlohmann::json parse_value(Cursor& c);

nlohmann::json parse_array(Cursor& c) {
    ++c.pos; // '['
    nlohmann::json arr = nlohmann::json::array();
    c.skip_ws();
    if (c.peek() == ']') {
        ++c.pos;
        return arr;
    }
    for (;;) {
        arr.push_back(parse_value(c));
        c.skip_ws();
        if (c.peek() == ',') {
            ++c.pos;
            c.skip_ws();
            if (c.peek() == ']') { // trailing comma
                ++c.pos;
                return arr;
            }
            continue;
        }
        if (c.peek() == ']') {
            ++c.pos;
            return arr;
        }
        c.fail("expected ',' or ']' in array");
    }
}

nlohmann::json parse_inline_table(Cursor& c) {
    ++c.pos; // '{'
    nlohmann::json obj = nlohmann::json::object();
    c.skip_ws();
    if (c.peek() == '}') {
        ++c.pos;
        return obj;
    }
    for (;;) {
        const auto path = parse_key_path(c);
        c.skip_ws();
        if (c.peek() != '=')
            c.fail("expected '=' in inline table");
        ++c.pos;
        insert_path(obj, path, parse_value(c), c);
        c.skip_ws();
        if (c.peek() == ',') {
            ++c.pos;
            continue;
        }
        if (c.peek() == '}') {
            ++c.pos;
            return obj;
        }
        c.fail("expected ',' or '}' in inline table");
    }
}

bool match_word(Cursor& c, const char* word, std::size_t len) {
    if (c.s.compare(c.pos, len, word) != 0)
        return false;
    const std::size_t after = c.pos + len;
    if (after < c.s.size()) {
        const char ch = c.s[after];
        if (ch != ' ' && ch != '\t' && ch != ',' && ch != ']' && ch != '}')
            return false;
    }
    c.pos = after;
    return true;
}

nlohmann::json parse_number(Cursor& c) {
    const std::size_t start = c.pos;
    while (!c.done()) {
        const char ch = c.s[c.pos];
        if (ch == ',' || ch == ']' || ch == '}' || ch == ' ' || ch == '\t')
            break;
        ++c.pos;
    }
    const std::string tok = c.s.substr(start, c.pos - start);
    if (tok.empty())
        c.fail("expected a value");
    std::string clean;
    for (const char ch : tok)
        if (ch != '_')
            clean += ch;
    bool is_int = !clean.empty();
    std::size_t k = (clean[0] == '+' || clean[0] == '-') ? 1 : 0;
    if (k == clean.size())
        is_int = false;
    for (; k < clean.size() && is_int; ++k)
        if (!std::isdigit(static_cast<unsigned char>(clean[k])))
            is_int = false;
    if (is_int) {
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(clean.c_str(), &end, 10);
        if (errno == 0 && end && *end == '\0')
            return nlohmann::json(v);
    }
    // decimal floats only; strtod alone would also admit hex forms
    std::size_t i = (clean[0] == '+' || clean[0] == '-') ? 1 : 0;
    const auto digits = [&](std::size_t from) {
        std::size_t at = from;
        while (at < clean.size() &&
               std::isdigit(static_cast<unsigned char>(clean[at])))
            ++at;
        return at;
    };
    std::size_t at = digits(i);
    bool ok = at > i;
    if (ok && at < clean.size() && clean[at] == '.') {
        const std::size_t frac = digits(at + 1);
        ok = frac > at + 1;
        at = frac;
    }
    if (ok && at < clean.size() && (clean[at] == 'e' || clean[at] == 'E')) {
        std::size_t ex = at + 1;
        if (ex < clean.size() && (clean[ex] == '+' || clean[ex] == '-'))
            ++ex;
        const std::size_t stop = digits(ex);
        ok = stop > ex;
        at = stop;
    }
    if (!ok || at != clean.size())
        c.fail("bad value '" + tok + "'");
    char* end = nullptr;
    const double d = std::strtod(clean.c_str(), &end);
    if (end == clean.c_str() || !end || *end != '\0')
        c.fail("bad value '" + tok + "'");
    return nlohmann::json(d);
}

nlohmann::json parse_value(Cursor& c) {
    c.skip_ws();
    const char ch = c.peek();
    if (ch == '"')
        return nlohmann::json(parse_basic_string(c));
    if (ch == '\'')
        return nlohmann::json(parse_literal_string(c));
    if (ch == '[')
        return parse_array(c);
    if (ch == '{')
        return parse_inline_table(c);
    if (match_word(c, "true", 4))
        return nlohmann::json(true);
    if (match_word(c, "false", 5))
        return nlohmann::json(false);
    return parse_number(c);
}

// Removes a trailing # comment, tracking strings so quoted hashes stay.
std::string strip_comment(const std::string& raw) {
    std::string line;
    bool in_basic = false, in_literal = false, escaped = false;
    for (const char ch : raw) {
        if (in_basic) {
            line += ch;
            if (escaped)
                escaped = false;
            else if (ch == '\\')
                escaped = true;
            else if (ch == '"')
                in_basic = false;
            continue;
        }
        if (in_literal) {
            line += ch;
            if (ch == '\'')
                in_literal = false;
            continue;
        }
        if (ch == '#')
            break;
        line += ch;
        if (ch == '"')
            in_basic = true;
        else if (ch == '\'')
            in_literal = true;
    }
    return line;
}

} // namespace

nlohmann::json parse_toml(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const std::string line = strip_comment(raw);
        Cursor c{line, 0, lineno};
        c.skip_ws();
        if (c.done())
            continue;
        if (c.peek() == '[') {
            if (c.pos + 1 < line.size() && line[c.pos + 1] == '[')
                c.fail("table arrays are not supported");
            ++c.pos;
            const auto path = parse_key_path(c);
            c.skip_ws();
            if (c.peek() != ']')
                c.fail("expected ']'");
            ++c.pos;
            c.skip_ws();
            if (!c.done())
                c.fail("unexpected text after table header");
            nlohmann::json* t = &root;
            for (const auto& k : path) {
                auto& slot = (*t)[k];
                if (slot.is_null())
                    slot = nlohmann::json::object();
                if (!slot.is_object())
                    c.fail("key '" + k + "' is not a table");
                t = &slot;
            }
            current = t;
            continue;
        }
        const auto path = parse_key_path(c);
        c.skip_ws();
        if (c.peek() != '=')
            c.fail("expected '=' after key");
        ++c.pos;
        nlohmann::json v = parse_value(c);
        c.skip_ws();
        if (!c.done())
            c.fail("unexpected text after value");
        insert_path(*current, path, std::move(v), c);
    }
    return root;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::string ext;
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos) {
        ext = path.substr(dot + 1);
        for (auto& ch : ext)
            ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    bool as_json;
    if (ext == "json") {
        as_json = true;
    } else if (ext == "toml") {
        as_json = false;
    } else {
        std::size_t k = 0;
        while (k < text.size() &&
               std::isspace(static_cast<unsigned char>(text[k])))
            ++k;
        as_json = k < text.size() && text[k] == '{';
    }
    if (as_json) {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    try {
        return parse_toml(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace catmzi
