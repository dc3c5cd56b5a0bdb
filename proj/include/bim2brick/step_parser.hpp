#ifndef BIM2BRICK_STEP_PARSER_HPP
#define BIM2BRICK_STEP_PARSER_HPP

// Tokenizer and parser for the clear-text STEP exchange format (ISO 10303-21)
// as used by IFC files. Produces an entity table with untyped argument trees;
// IFC semantics are interpreted elsewhere.

#include <bim2brick/diagnostics.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace bim2brick::step {

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& reason)
        : Error("STEP syntax error at " + std::to_string(line) + ":" +
                std::to_string(column) + ": " + reason),
          line(line), column(column), reason(reason) {}

    std::size_t line;
    std::size_t column;
    std::string reason;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(std::int64_t id)
        : Error("duplicate STEP instance id #" + std::to_string(id)), id(id) {}

    std::int64_t id;
};

class MissingDataSection : public Error {
public:
    MissingDataSection() : Error("STEP file has no DATA section") {}
};

// One parameter value of a STEP record. Lists and typed values nest.
struct Value {
    struct Null {
        bool operator==(const Null&) const = default;
    };
    struct Derived {
        bool operator==(const Derived&) const = default;
    };
    struct Enum {
        std::string token;  // without the enclosing dots
        bool operator==(const Enum&) const = default;
    };
    struct Ref {
        std::int64_t id = 0;
        bool operator==(const Ref&) const = default;
    };
    struct Typed {
        std::string name;
        std::vector<Value> inner;  // exactly one element
        bool operator==(const Typed&) const = default;
    };
    using List = std::vector<Value>;
    using Storage =
        std::variant<Null, Derived, std::int64_t, double, std::string, Enum, Ref, Typed, List>;

    Storage v;

    Value() : v(Null{}) {}
    Value(Storage s) : v(std::move(s)) {}

    bool is_null() const { return std::holds_alternative<Null>(v); }
    bool is_derived() const { return std::holds_alternative<Derived>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_real() const { return std::holds_alternative<double>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_enum() const { return std::holds_alternative<Enum>(v); }
    bool is_ref() const { return std::holds_alternative<Ref>(v); }
    bool is_typed() const { return std::holds_alternative<Typed>(v); }
    bool is_list() const { return std::holds_alternative<List>(v); }

    std::int64_t as_int() const { return std::get<std::int64_t>(v); }
    // integer literals are valid where a real is expected
    double as_real() const {
        if (is_int()) return static_cast<double>(as_int());
        return std::get<double>(v);
    }
    const std::string& as_string() const { return std::get<std::string>(v); }
    const Enum& as_enum() const { return std::get<Enum>(v); }
    std::int64_t ref_id() const { return std::get<Ref>(v).id; }
    const Typed& as_typed() const { return std::get<Typed>(v); }
    const List& as_list() const { return std::get<List>(v); }

    bool operator==(const Value&) const = default;
};

struct Entity {
    std::int64_t id = 0;
    std::string type_name;     // uppercase
    std::vector<Value> args;   // source order
};

struct Header {
    std::string description;
    std::string name;
    std::string schema;
};

// referrer id -> referenced-but-missing id
using DanglingRef = std::pair<std::int64_t, std::int64_t>;

struct StepFile {
    Header header;
    std::map<std::int64_t, Entity> entities;  // keyed and iterated by instance id
    std::vector<DanglingRef> dangling;        // filled by resolve_refs

    const Entity* find(std::int64_t id) const {
        auto it = entities.find(id);
        return it == entities.end() ? nullptr : &it->second;
    }
};

namespace detail {

inline void append_codepoint_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes one UTF-8 codepoint starting at i; advances i. Malformed bytes are
// taken as Latin-1 so encoding never fails.
inline std::uint32_t next_codepoint_utf8(const std::string& s, std::size_t& i) {
    unsigned char c0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() &&
               (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if (c0 < 0x80) {
        i += 1;
        return c0;
    }
    if ((c0 & 0xE0) == 0xC0 && cont(1)) {
        std::uint32_t cp = (c0 & 0x1Fu) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
        i += 2;
        return cp;
    }
    if ((c0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        std::uint32_t cp = (c0 & 0x0Fu) << 12 |
                           (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
        i += 3;
        return cp;
    }
    if ((c0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        std::uint32_t cp = (c0 & 0x07u) << 18 |
                           (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                           (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
        i += 4;
        return cp;
    }
    i += 1;
    return c0;
}

inline int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

}  // namespace detail

// Decodes the body of a quoted STEP string (without the quotes, `''` still
// doubled) to UTF-8. Handles '' \\ \S\ \X\ \X2\ \X4\ ; unknown backslash
// sequences pass through literally.
inline std::string decode_string(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    auto read_hex = [&](std::size_t at, int n, std::uint32_t& cp) -> bool {
        if (at + n > raw.size()) return false;
        cp = 0;
        for (int k = 0; k < n; ++k) {
            int d = detail::hex_digit(raw[at + k]);
            if (d < 0) return false;
            cp = cp << 4 | static_cast<std::uint32_t>(d);
        }
        return true;
    };
    while (i < raw.size()) {
        char c = raw[i];
        if (c == '\'') {
            // doubled quote inside the token body
            out.push_back('\'');
            i += (i + 1 < raw.size() && raw[i + 1] == '\'') ? 2 : 1;
            continue;
        }
        if (c != '\\') {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + 1 >= raw.size()) {
            out.push_back('\\');
            ++i;
            continue;
        }
        char d = raw[i + 1];
        if (d == '\\') {
            out.push_back('\\');
            i += 2;
            continue;
        }
        if ((d == 'S' || d == 's') && i + 3 < raw.size() && raw[i + 2] == '\\') {
            // \S\c : ISO 8859-1 upper half
            detail::append_codepoint_utf8(out, 0x80u + (static_cast<unsigned char>(raw[i + 3]) & 0x7Fu));
            i += 4;
            continue;
        }
        if ((d == 'X' || d == 'x') && i + 2 < raw.size()) {
            if (raw[i + 2] == '\\') {
                std::uint32_t cp;
                if (read_hex(i + 3, 2, cp)) {
                    detail::append_codepoint_utf8(out, cp);
                    i += 5;
                    continue;
                }
            } else if ((raw[i + 2] == '2' || raw[i + 2] == '4') && i + 3 < raw.size() &&
                       raw[i + 3] == '\\') {
                int width = raw[i + 2] == '2' ? 4 : 8;
                std::size_t j = i + 4;
                bool ok = true;
                std::vector<std::uint32_t> cps;
                while (true) {
                    if (j + 3 < raw.size() && raw[j] == '\\' && (raw[j + 1] == 'X' || raw[j + 1] == 'x') &&
                        raw[j + 2] == '0' && raw[j + 3] == '\\') {
                        j += 4;
                        break;
                    }
                    std::uint32_t cp;
                    if (!read_hex(j, width, cp)) {
                        ok = false;
                        break;
                    }
                    cps.push_back(cp);
                    j += static_cast<std::size_t>(width);
                }
                if (ok) {
                    // merge UTF-16 surrogate pairs that sneak into \X2\ runs
                    for (std::size_t k = 0; k < cps.size(); ++k) {
                        std::uint32_t cp = cps[k];
                        if (cp >= 0xD800 && cp < 0xDC00 && k + 1 < cps.size() &&
                            cps[k + 1] >= 0xDC00 && cps[k + 1] < 0xE000) {
                            cp = 0x10000 + ((cp - 0xD800) << 10) + (cps[k + 1] - 0xDC00);
                            ++k;
                        }
                        detail::append_codepoint_utf8(out, cp);
                    }
                    i = j;
                    continue;
                }
            }
        }
        // unrecognized escape: keep the backslash literally
        out.push_back('\\');
        ++i;
    }
    return out;
}

// Encodes a UTF-8 string to the canonical STEP quoted form (without quotes):
// ' doubled, \ doubled, control chars as \X\hh, non-ASCII as merged
// \X2\..\X0\ / \X4\..\X0\ runs.
inline std::string encode_string(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size() + 8);
    std::size_t i = 0;
    while (i < s.size()) {
        std::uint32_t cp = detail::next_codepoint_utf8(s, i);
        if (cp == '\'') {
            out += "''";
        } else if (cp == '\\') {
            out += "\\\\";
        } else if (cp >= 0x20 && cp < 0x7F) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x80) {
            out += "\\X\\";
            out.push_back(hex[cp >> 4]);
            out.push_back(hex[cp & 0xF]);
        } else {
            // gather a maximal run of non-ASCII codepoints
            std::vector<std::uint32_t> run{cp};
            while (i < s.size()) {
                std::size_t save = i;
                std::uint32_t nx = detail::next_codepoint_utf8(s, i);
                if (nx < 0x80) {
                    i = save;
                    break;
                }
                run.push_back(nx);
            }
            bool wide = false;
            for (std::uint32_t r : run) wide = wide || r > 0xFFFF;
            int width = wide ? 8 : 4;
            out += wide ? "\\X4\\" : "\\X2\\";
            for (std::uint32_t r : run) {
                for (int k = width - 1; k >= 0; --k) out.push_back(hex[(r >> (4 * k)) & 0xF]);
            }
            out += "\\X0\\";
        }
    }
    return out;
}

// Renders a value back to STEP token text (canonical spellings).
inline std::string to_text(const Value& value) {
    struct Renderer {
        std::string out;
        void render(const Value& v) {
            if (v.is_null()) {
                out += '$';
            } else if (v.is_derived()) {
                out += '*';
            } else if (v.is_int()) {
                out += std::to_string(v.as_int());
            } else if (v.is_real()) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17G", std::get<double>(v.v));
                std::string t = buf;
                // STEP reals must contain a point
                if (t.find('.') == std::string::npos) {
                    auto e = t.find('E');
                    if (e == std::string::npos) t += '.';
                    else t.insert(e, ".");
                }
                out += t;
            } else if (v.is_string()) {
                out += '\'';
                out += encode_string(v.as_string());
                out += '\'';
            } else if (v.is_enum()) {
                out += '.';
                out += v.as_enum().token;
                out += '.';
            } else if (v.is_ref()) {
                out += '#';
                out += std::to_string(v.ref_id());
            } else if (v.is_typed()) {
                out += v.as_typed().name;
                out += '(';
                render(v.as_typed().inner.front());
                out += ')';
            } else {
                out += '(';
                const auto& list = v.as_list();
                for (std::size_t i = 0; i < list.size(); ++i) {
                    if (i) out += ',';
                    render(list[i]);
                }
                out += ')';
            }
        }
    } r;
    r.render(value);
    return r.out;
}

namespace detail {

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return pos_ - line_start_ + 1; }

    [[noreturn]] void fail(const std::string& reason) const {
        throw SyntaxError(line_, column(), reason);
    }

    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        return text_[pos_];
    }

    void expect(char c) {
        char got = peek();
        if (got != c) fail(std::string("expected '") + c + "', got '" + got + "'");
        advance();
    }

    bool accept(char c) {
        if (eof()) return false;
        if (text_[pos_] != c) return false;
        advance();
        return true;
    }

    // keywords and entity type names: letter then [A-Z0-9_-]
    std::string identifier() {
        char c = peek();
        if (!is_alpha(c) && c != '_') fail("expected identifier");
        std::string id;
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (is_alpha(c) || is_digit(c) || c == '_' || c == '-') {
                id.push_back(to_upper(c));
                advance();
            } else {
                break;
            }
        }
        return id;
    }

    std::int64_t instance_id() {
        expect('#');
        if (pos_ >= text_.size() || !is_digit(text_[pos_])) fail("expected instance number after '#'");
        std::int64_t id = 0;
        bool overflow = false;
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            if (id > (INT64_MAX - 9) / 10) overflow = true;
            else id = id * 10 + (text_[pos_] - '0');
            advance();
        }
        if (overflow) fail("instance number out of range");
        if (id <= 0) fail("instance number must be positive");
        return id;
    }

    // number token; STEP reals contain '.' or an exponent
    Value number() {
        std::size_t start = pos_;
        bool real = false;
        if (text_[pos_] == '+' || text_[pos_] == '-') advance();
        if (pos_ >= text_.size() || !is_digit(text_[pos_])) fail("malformed number");
        while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            real = true;
            advance();
            while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            real = true;
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
            if (pos_ >= text_.size() || !is_digit(text_[pos_])) fail("malformed exponent");
            while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
        }
        std::string tok(text_.substr(start, pos_ - start));
        try {
            if (real) return Value{std::stod(tok)};
            return Value{static_cast<std::int64_t>(std::stoll(tok))};
        } catch (const std::out_of_range&) {
            if (real) fail("real literal out of range");
            return Value{std::stod(tok)};  // huge integers degrade to real
        }
    }

    // body of a quoted string; returns decoded UTF-8
    std::string string_body() {
        expect('\'');
        const std::size_t open_line = line_, open_col = column() - 1;
        std::string raw;
        while (true) {
            if (pos_ >= text_.size()) throw SyntaxError(open_line, open_col, "unterminated string");
            char c = text_[pos_];
            if (c == '\'') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
                    raw += "''";
                    advance();
                    advance();
                    continue;
                }
                advance();
                break;
            }
            raw.push_back(c);
            advance();
        }
        return decode_string(raw);
    }

    std::string enum_body() {
        expect('.');
        std::string tok;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '.') {
                advance();
                if (tok.empty()) fail("empty enumeration token");
                return tok;
            }
            if (is_alpha(c) || is_digit(c) || c == '_' || c == '-' || c == '+') {
                tok.push_back(to_upper(c));
                advance();
            } else {
                fail("malformed enumeration token");
            }
        }
        fail("unterminated enumeration token");
    }

private:
    static bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static char to_upper(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 32) : c; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            line_start_ = pos_ + 1;
        }
        ++pos_;
    }

    // whitespace and /* */ comments are insignificant everywhere outside strings
    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                std::size_t cl = line_, cc = column();
                advance();
                advance();
                while (true) {
                    if (pos_ + 1 >= text_.size()) throw SyntaxError(cl, cc, "unterminated comment");
                    if (text_[pos_] == '*' && text_[pos_ + 1] == '/') {
                        advance();
                        advance();
                        break;
                    }
                    advance();
                }
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
};

inline Value parse_value(Lexer& lex, int depth) {
    if (depth > 200) lex.fail("value nesting too deep");
    char c = lex.peek();
    if (c == '$') {
        lex.expect('$');
        return Value{Value::Null{}};
    }
    if (c == '*') {
        lex.expect('*');
        return Value{Value::Derived{}};
    }
    if (c == '#') return Value{Value::Ref{lex.instance_id()}};
    if (c == '\'') return Value{lex.string_body()};
    if (c == '.') return Value{Value::Enum{lex.enum_body()}};
    if (c == '(') {
        lex.expect('(');
        Value::List list;
        if (!lex.accept(')')) {
            while (true) {
                list.push_back(parse_value(lex, depth + 1));
                if (lex.accept(',')) continue;
                lex.expect(')');
                break;
            }
        }
        return Value{std::move(list)};
    }
    if (c == '+' || c == '-' || (c >= '0' && c <= '9')) return lex.number();
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_') {
        // inline typed value, e.g. IFCLABEL('x')
        std::string name = lex.identifier();
        lex.expect('(');
        Value inner = parse_value(lex, depth + 1);
        lex.expect(')');
        return Value{Value::Typed{std::move(name), {std::move(inner)}}};
    }
    lex.fail(std::string("unexpected character '") + c + "' in value");
}

inline std::vector<Value> parse_arg_list(Lexer& lex) {
    lex.expect('(');
    std::vector<Value> args;
    if (lex.accept(')')) return args;
    while (true) {
        args.push_back(parse_value(lex, 0));
        if (lex.accept(',')) continue;
        lex.expect(')');
        break;
    }
    return args;
}

inline const std::string* first_string(const std::vector<Value>& args) {
    for (const auto& a : args) {
        if (a.is_string()) return &a.as_string();
        if (a.is_list()) {
            if (const auto* s = first_string(a.as_list())) return s;
        }
        if (a.is_typed()) {
            if (const auto* s = first_string(a.as_typed().inner)) return s;
        }
    }
    return nullptr;
}

inline void collect_refs(const Value& v, std::vector<std::int64_t>& out) {
    if (v.is_ref()) {
        out.push_back(v.ref_id());
    } else if (v.is_list()) {
        for (const auto& e : v.as_list()) collect_refs(e, out);
    } else if (v.is_typed()) {
        for (const auto& e : v.as_typed().inner) collect_refs(e, out);
    }
}

}  // namespace detail

// Parses a complete ISO 10303-21 exchange structure. Throws SyntaxError,
// DuplicateId or MissingDataSection; never crashes on arbitrary bytes.
inline StepFile parse_step(std::string_view text) {
    detail::Lexer lex(text);
    StepFile file;

    std::string magic;
    if (!lex.eof() && (lex.peek() == '#')) {
        // tolerated: bare DATA records without the envelope, still needs DATA
        throw MissingDataSection();
    }
    magic = lex.identifier();
    if (magic != "ISO-10303-21") lex.fail("expected ISO-10303-21 envelope");
    lex.expect(';');

    bool seen_data = false;
    while (true) {
        if (lex.eof()) lex.fail("unexpected end of input before END-ISO-10303-21");
        std::string section = lex.identifier();
        if (section == "END-ISO-10303-21") {
            lex.expect(';');
            break;
        }
        if (section == "HEADER") {
            lex.expect(';');
            while (true) {
                if (lex.eof()) lex.fail("unterminated HEADER section");
                if (lex.peek() == '#') lex.fail("instance record inside HEADER");
                std::string name = lex.identifier();
                if (name == "ENDSEC") {
                    lex.expect(';');
                    break;
                }
                auto args = detail::parse_arg_list(lex);
                lex.expect(';');
                const std::string* s = detail::first_string(args);
                if (name == "FILE_DESCRIPTION" && s) file.header.description = *s;
                else if (name == "FILE_NAME" && s) file.header.name = *s;
                else if (name == "FILE_SCHEMA" && s) file.header.schema = *s;
            }
        } else if (section == "DATA") {
            seen_data = true;
            if (lex.peek() == '(') (void)detail::parse_arg_list(lex);  // ed.2 section parameters
            lex.expect(';');
            while (true) {
                if (lex.eof()) lex.fail("unterminated DATA section");
                char c = lex.peek();
                if (c == '#') {
                    std::int64_t id = lex.instance_id();
                    lex.expect('=');
                    if (lex.peek() == '(') lex.fail("complex entity instances are not supported");
                    Entity ent;
                    ent.id = id;
                    ent.type_name = lex.identifier();
                    if (ent.type_name.empty()) lex.fail("missing entity type name");
                    ent.args = detail::parse_arg_list(lex);
                    lex.expect(';');
                    if (!file.entities.emplace(id, std::move(ent)).second) throw DuplicateId(id);
                } else {
                    std::string kw = lex.identifier();
                    if (kw != "ENDSEC") lex.fail("expected '#' record or ENDSEC in DATA section");
                    lex.expect(';');
                    break;
                }
            }
        } else {
            // unknown sections (e.g. ANCHOR/REFERENCE) are skipped record by record
            lex.expect(';');
            while (true) {
                if (lex.eof()) lex.fail("unterminated section");
                if (lex.peek() == '#') {
                    (void)lex.instance_id();
                    lex.expect('=');
                    (void)lex.identifier();
                    (void)detail::parse_arg_list(lex);
                    lex.expect(';');
                    continue;
                }
                std::string kw = lex.identifier();
                if (kw == "ENDSEC") {
                    lex.expect(';');
                    break;
                }
                if (lex.peek() == '(') (void)detail::parse_arg_list(lex);
                lex.expect(';');
            }
        }
    }
    if (!seen_data) throw MissingDataSection();
    return file;
}

// Checks every entity reference; dangling ones are recorded on the file,
// sorted by (referrer, target), not treated as fatal.
inline StepFile resolve_refs(StepFile file) {
    file.dangling.clear();
    for (const auto& [id, ent] : file.entities) {
        std::vector<std::int64_t> refs;
        for (const auto& arg : ent.args) detail::collect_refs(arg, refs);
        for (std::int64_t target : refs) {
            if (!file.entities.count(target)) file.dangling.emplace_back(id, target);
        }
    }
    std::sort(file.dangling.begin(), file.dangling.end());
    file.dangling.erase(std::unique(file.dangling.begin(), file.dangling.end()),
                        file.dangling.end());
    return file;
}

}  // namespace bim2brick::step

#endif
