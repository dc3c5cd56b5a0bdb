#ifndef BIM2BRICK_TURTLE_HPP
#define BIM2BRICK_TURTLE_HPP

// Deterministic Turtle 1.1 output for BrickGraph plus a subset parser that
// reads the serializer's own grammar back (round-trip testing, graph diff).

#include <bim2brick/brick_graph.hpp>
#include <bim2brick/diagnostics.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bim2brick::brick {

class TurtleSyntaxError : public Error {
public:
    TurtleSyntaxError(std::size_t line, const std::string& reason)
        : Error("turtle syntax error at line " + std::to_string(line) + ": " + reason),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline bool local_name_safe(std::string_view local) {
    if (local.empty()) return false;
    for (char c : local) {
        const bool ok =
            (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return !(local[0] >= '0' && local[0] <= '9');
}

// longest declared prefix wins; falls back to <absolute-iri>
inline std::string render_iri(const BrickGraph& g, const std::string& iri) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& p : g.prefixes) {
        if (iri.rfind(p.second, 0) != 0) continue;
        if (!best || p.second.size() > best->second.size()) best = &p;
    }
    if (best) {
        const std::string local = iri.substr(best->second.size());
        if (local_name_safe(local)) return best->first + ":" + local;
    }
    return "<" + iri + ">";
}

inline std::string escape_string(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04X", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

inline std::string render_object(const BrickGraph& g, const RdfObject& o) {
    switch (o.kind) {
        case RdfObject::Kind::Iri: return render_iri(g, o.text);
        case RdfObject::Kind::String: return "\"" + escape_string(o.text) + "\"";
        case RdfObject::Kind::Integer: return std::to_string(o.number);
    }
    return {};
}

}  // namespace detail

// Canonical Turtle: prefixes sorted by prefix, subjects sorted by IRI,
// rdf:type first (as `a`), remaining predicates sorted by absolute IRI,
// objects grouped with `,`. Equal graphs produce byte-identical output.
inline std::string serialize_turtle(const BrickGraph& graph) {
    BrickGraph g = graph;
    g.canonicalize();

    std::string out;
    for (const auto& [prefix, iri] : g.prefixes)
        out += "@prefix " + prefix + ": <" + iri + "> .\n";

    std::size_t i = 0;
    const auto& ts = g.triples;
    while (i < ts.size()) {
        const std::string& subject = ts[i].subject;
        out += "\n" + detail::render_iri(g, subject);
        bool first_pred = true;
        while (i < ts.size() && ts[i].subject == subject) {
            const std::string& pred = ts[i].predicate;
            out += first_pred ? " " : " ;\n    ";
            first_pred = false;
            out += pred == kRdfType ? "a" : detail::render_iri(g, pred);
            bool first_obj = true;
            while (i < ts.size() && ts[i].subject == subject && ts[i].predicate == pred) {
                out += first_obj ? " " : ",\n        ";
                first_obj = false;
                out += detail::render_object(g, ts[i].object);
                ++i;
            }
        }
        out += " .\n";
    }
    return out;
}

namespace detail {

class TurtleParser {
public:
    explicit TurtleParser(std::string_view text) : text_(text) {}

    BrickGraph parse() {
        BrickGraph g;
        skip_trivia();
        while (pos_ < text_.size()) {
            if (peek() == '@') {
                parse_prefix(g);
            } else {
                parse_triples(g);
            }
            skip_trivia();
        }
        g.canonicalize();
        return g;
    }

private:
    [[noreturn]] void fail(const std::string& reason) const { throw TurtleSyntaxError(line_, reason); }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    char take() {
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_trivia() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_trivia();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        take();
    }

    static bool name_char(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-';
    }

    std::string take_word() {
        std::string w;
        while (pos_ < text_.size() && name_char(peek())) w += take();
        return w;
    }

    std::string take_iriref() {
        expect('<');
        std::string iri;
        while (peek() != '>') {
            if (pos_ >= text_.size()) fail("unterminated IRI");
            iri += take();
        }
        take();
        return iri;
    }

    std::string take_string() {
        expect('"');
        std::string s;
        while (true) {
            if (pos_ >= text_.size()) fail("unterminated string literal");
            char c = take();
            if (c == '"') break;
            if (c != '\\') {
                s += c;
                continue;
            }
            const char esc = take();
            switch (esc) {
                case '"': s += '"'; break;
                case '\\': s += '\\'; break;
                case 'n': s += '\n'; break;
                case 'r': s += '\r'; break;
                case 't': s += '\t'; break;
                case 'u': {
                    std::uint32_t cp = 0;
                    for (int i = 0; i < 4; ++i) {
                        const char h = take();
                        cp <<= 4;
                        if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
                        else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
                        else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
                        else fail("bad \\u escape");
                    }
                    if (cp < 0x80) {
                        s += static_cast<char>(cp);
                    } else if (cp < 0x800) {
                        s += static_cast<char>(0xC0 | (cp >> 6));
                        s += static_cast<char>(0x80 | (cp & 0x3F));
                    } else {
                        s += static_cast<char>(0xE0 | (cp >> 12));
                        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                        s += static_cast<char>(0x80 | (cp & 0x3F));
                    }
                    break;
                }
                default: fail(std::string("unsupported string escape '\\") + esc + "'");
            }
        }
        return s;
    }

    void parse_prefix(BrickGraph& g) {
        take();  // '@'
        const std::string kw = take_word();
        if (kw != "prefix") fail("only @prefix directives are supported");
        skip_trivia();
        const std::string prefix = take_word();
        expect(':');
        skip_trivia();
        const std::string iri = take_iriref();
        expect('.');
        g.prefixes.emplace_back(prefix, iri);
        prefix_map_[prefix] = iri;
    }

    // IRIREF or prefixed name; `allow_a` treats a bare 'a' as rdf:type
    std::string parse_iri(bool allow_a) {
        skip_trivia();
        if (peek() == '<') return take_iriref();
        const std::size_t start_line = line_;
        const std::string word = take_word();
        if (peek() == ':') {
            take();
            const std::string local = take_word();
            auto it = prefix_map_.find(word);
            if (it == prefix_map_.end())
                throw TurtleSyntaxError(start_line, "unknown prefix '" + word + ":'");
            return it->second + local;
        }
        if (allow_a && word == "a") return kRdfType;
        fail(word.empty() ? "expected IRI" : "unexpected token '" + word + "'");
    }

    RdfObject parse_object() {
        skip_trivia();
        const char c = peek();
        if (c == '"') return RdfObject::str(take_string());
        if (c == '-' || c == '+' || (c >= '0' && c <= '9')) {
            std::string num;
            if (c == '-' || c == '+') num += take();
            while (peek() >= '0' && peek() <= '9') num += take();
            if (num.empty() || num == "-" || num == "+") fail("malformed integer literal");
            if (peek() == '.' || peek() == 'e' || peek() == 'E') fail("decimal literals are not supported");
            return RdfObject::integer(std::strtoll(num.c_str(), nullptr, 10));
        }
        return RdfObject::iri(parse_iri(false));
    }

    void parse_triples(BrickGraph& g) {
        const std::string subject = parse_iri(false);
        while (true) {
            skip_trivia();
            const std::string predicate = parse_iri(true);
            while (true) {
                RdfObject obj = parse_object();
                g.add(subject, predicate, std::move(obj));
                skip_trivia();
                if (peek() == ',') {
                    take();
                    continue;
                }
                break;
            }
            skip_trivia();
            if (peek() == ';') {
                take();
                skip_trivia();
                if (peek() == '.') break;  // trailing semicolon
                continue;
            }
            break;
        }
        expect('.');
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::map<std::string, std::string> prefix_map_;
};

}  // namespace detail

// Parses Turtle in the subset grammar this tool emits. Throws
// TurtleSyntaxError with a 1-based line number on malformed input.
inline BrickGraph parse_turtle(std::string_view text) {
    return detail::TurtleParser(text).parse();
}

}  // namespace bim2brick::brick

#endif
