#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Small TOML subset: [table] headers, bare keys, strings, integers, floats,
// booleans, and (nested, multi-line) arrays. No inline tables, dotted keys,
// dates or array-of-tables.
namespace obslab::cli::toml {

struct Position {
    std::size_t line = 0;
    std::size_t column = 0;
};

std::string describe(const Position& pos);

/// Error annotated with a 1-based line and column.
class ParseError : public std::runtime_error {
public:
    ParseError(const Position& pos, const std::string& what);
    [[nodiscard]] const Position& position() const noexcept { return pos_; }

private:
    Position pos_;
};

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<bool, std::int64_t, double, std::string, Array> data;
    Position pos;

    [[nodiscard]] bool is_number() const noexcept {
        return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
    }
    [[nodiscard]] std::string_view type_name() const noexcept;
};

struct Entry {
    std::string key;
    Value value;
    Position pos;
};

struct Table {
    std::string name;  // empty for the root table
    Position pos;
    std::vector<Entry> entries;

    [[nodiscard]] const Entry* find(std::string_view key) const;
    Entry* find(std::string_view key);
};

struct Document {
    Table root;
    std::vector<Table> tables;

    [[nodiscard]] const Table* find(std::string_view name) const;
    Table* find(std::string_view name);
};

/// Throws ParseError.
Document parse(std::string_view text);

/// Shortest decimal that reads back to the same double, always in float
/// syntax ("10.0", "1e-05", "inf").
std::string format_float(double v);

std::string quote(std::string_view s);

std::string serialize(const Document& doc);

}  // namespace obslab::cli::toml
