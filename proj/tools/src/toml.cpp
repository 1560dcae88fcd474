#include "obslab/cli/toml.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace obslab::cli::toml {

std::string describe(const Position& pos) {
    return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column);
}

ParseError::ParseError(const Position& pos, const std::string& what)
    : std::runtime_error(describe(pos) + ": " + what), pos_(pos) {}

std::string_view Value::type_name() const noexcept {
    switch (data.index()) {
        case 0: return "boolean";
        case 1: return "integer";
        case 2: return "float";
        case 3: return "string";
        default: return "array";
    }
}

const Entry* Table::find(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

Entry* Table::find(std::string_view key) {
    return const_cast<Entry*>(static_cast<const Table*>(this)->find(key));
}

const Table* Document::find(std::string_view name) const {
    for (const auto& t : tables) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

Table* Document::find(std::string_view name) {
    return const_cast<Table*>(static_cast<const Document*>(this)->find(name));
}

namespace {

bool is_bare(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Document run() {
        Document doc;
        Table* current = &doc.root;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                const Position at = here();
                advance();
                skip_spaces();
                std::string name = bare_key("table name");
                skip_spaces();
                expect(']');
                end_of_line();
                if (doc.find(name)) throw ParseError(at, "duplicate table [" + name + "]");
                doc.tables.push_back(Table{std::move(name), at, {}});
                current = &doc.tables.back();
                continue;
            }
            const Position at = here();
            std::string key = bare_key("key");
            skip_spaces();
            expect('=');
            skip_spaces();
            Value v = value();
            end_of_line();
            if (current->find(key)) throw ParseError(at, "duplicate key '" + key + "'");
            current->entries.push_back(Entry{std::move(key), std::move(v), at});
        }
        return doc;
    }

private:
    std::string_view text_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[nodiscard]] bool eof() const { return i_ >= text_.size(); }
    [[nodiscard]] char peek() const { return eof() ? '\0' : text_[i_]; }
    [[nodiscard]] Position here() const { return {line_, col_}; }

    void advance() {
        if (text_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void expect(char c) {
        if (peek() != c) throw ParseError(here(), std::string("expected '") + c + "'");
        advance();
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
    }

    void skip_comment() {
        if (peek() == '#') {
            while (!eof() && peek() != '\n') advance();
        }
    }

    void skip_blank_lines() {
        while (!eof()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\r') advance();
            if (peek() == '\n') {
                advance();
            } else {
                return;
            }
        }
    }

    // Whitespace, comments and newlines inside arrays.
    void skip_array_space() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == '#') {
                skip_comment();
            } else {
                return;
            }
        }
    }

    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (peek() == '\r') advance();
        if (eof()) return;
        if (peek() != '\n') throw ParseError(here(), "unexpected text after value");
        advance();
    }

    std::string bare_key(const char* what) {
        const Position at = here();
        std::string out;
        while (!eof() && is_bare(peek())) {
            out += peek();
            advance();
        }
        if (out.empty()) throw ParseError(at, std::string("expected ") + what);
        return out;
    }

    Value value() {
        const Position at = here();
        const char c = peek();
        if (c == '"' || c == '\'') return Value{string_value(), at};
        if (c == '[') return Value{array(), at};
        if (c == 't' || c == 'f') {
            std::string word;
            while (!eof() && is_bare(peek())) {
                word += peek();
                advance();
            }
            if (word == "true") return Value{true, at};
            if (word == "false") return Value{false, at};
            throw ParseError(at, "invalid value '" + word + "'");
        }
        return number();
    }

    std::string string_value() {
        const Position at = here();
        const char quote_char = peek();
        advance();
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') throw ParseError(at, "unterminated string");
            const char c = peek();
            advance();
            if (c == quote_char) break;
            if (c == '\\' && quote_char == '"') {
                if (eof()) throw ParseError(at, "unterminated string");
                const Position esc = here();
                const char e = peek();
                advance();
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    default: throw ParseError(esc, std::string("unsupported escape '\\") + e + "'");
                }
                continue;
            }
            out += c;
        }
        return out;
    }

    Array array() {
        expect('[');
        Array out;
        while (true) {
            skip_array_space();
            if (peek() == ']') {
                advance();
                return out;
            }
            if (eof()) throw ParseError(here(), "unterminated array");
            out.push_back(value());
            skip_array_space();
            if (peek() == ',') {
                advance();
            } else if (peek() != ']') {
                throw ParseError(here(), "expected ',' or ']' in array");
            }
        }
    }

    Value number() {
        const Position at = here();
        std::string tok;
        while (!eof()) {
            const char c = peek();
            if (is_bare(c) || c == '+' || c == '.') {
                tok += c;
                advance();
            } else {
                break;
            }
        }
        if (tok.empty()) throw ParseError(at, "expected a value");
        std::string digits;
        for (char c : tok) {
            if (c != '_') digits += c;
        }
        if (digits.empty()) throw ParseError(at, "invalid value '" + tok + "'");
        std::string_view body = digits;
        bool negative = false;
        if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
            negative = body.front() == '-';
            body.remove_prefix(1);
        }
        if (body == "inf" || body == "nan") {
            const double v =
                body == "inf" ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
            return Value{negative ? -v : v, at};
        }
        const bool is_float = body.find_first_of(".eE") != std::string_view::npos;
        const char* first = digits.data() + (digits.front() == '+' ? 1 : 0);
        const char* last = digits.data() + digits.size();
        if (is_float) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last) throw ParseError(at, "invalid number '" + tok + "'");
            return Value{v, at};
        }
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec == std::errc::result_out_of_range) throw ParseError(at, "integer out of range '" + tok + "'");
        if (ec != std::errc{} || ptr != last) throw ParseError(at, "invalid value '" + tok + "'");
        return Value{v, at};
    }
};

void write_value(std::ostream& os, const Value& v) {
    std::visit(
        [&os](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) {
                os << (x ? "true" : "false");
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                os << x;
            } else if constexpr (std::is_same_v<T, double>) {
                os << format_float(x);
            } else if constexpr (std::is_same_v<T, std::string>) {
                os << quote(x);
            } else {
                os << '[';
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (i) os << ", ";
                    write_value(os, x[i]);
                }
                os << ']';
            }
        },
        v.data);
}

void write_entries(std::ostream& os, const Table& t) {
    for (const auto& e : t.entries) {
        os << e.key << " = ";
        write_value(os, e.value);
        os << '\n';
    }
}

}  // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

std::string format_float(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string out(buf, ptr);
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out + '"';
}

std::string serialize(const Document& doc) {
    std::ostringstream os;
    write_entries(os, doc.root);
    for (const auto& t : doc.tables) {
        if (os.tellp() > 0) os << '\n';
        os << '[' << t.name << "]\n";
        write_entries(os, t);
    }
    return os.str();
}

}  // namespace obslab::cli::toml
