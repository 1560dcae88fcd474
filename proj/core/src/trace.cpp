#include "obslab/trace.hpp"

#include <stdexcept>

namespace obslab {

SimTrace::SimTrace(std::vector<std::string> names) : names_(std::move(names)), columns_(names_.size()) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j]) throw std::invalid_argument("SimTrace: duplicate column " + names_[i]);
}

std::optional<std::size_t> SimTrace::index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

std::span<const double> SimTrace::column(std::string_view name) const {
    const auto idx = index(name);
    if (!idx) throw std::out_of_range("SimTrace: no column named " + std::string(name));
    return columns_[*idx];
}

void SimTrace::append(std::span<const double> row) {
    if (row.size() != names_.size()) throw std::invalid_argument("SimTrace::append: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) columns_[i].push_back(row[i]);
}

}  // namespace obslab
