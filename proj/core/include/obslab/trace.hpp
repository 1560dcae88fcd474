#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obslab {

/// Column-oriented, append-only table of uniformly decimated samples.
class SimTrace {
public:
    SimTrace() = default;
    explicit SimTrace(std::vector<std::string> names);

    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return names_.size(); }

    [[nodiscard]] bool has(std::string_view name) const { return index(name).has_value(); }
    [[nodiscard]] std::optional<std::size_t> index(std::string_view name) const;

    /// Throws std::out_of_range for unknown names.
    [[nodiscard]] std::span<const double> column(std::string_view name) const;
    [[nodiscard]] std::span<const double> column(std::size_t idx) const { return columns_.at(idx); }

    [[nodiscard]] double at(std::size_t row, std::string_view name) const { return column(name)[row]; }

    void append(std::span<const double> row);

    friend bool operator==(const SimTrace&, const SimTrace&) = default;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace obslab
