#include "textchar/cluster.hpp"

#include <cmath>
#include <string>

#include "textchar/error.hpp"

namespace textchar {

EmbeddedCluster::EmbeddedCluster(std::size_t rows, std::size_t dim, std::vector<double> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
    if (rows_ > 0 && dim_ == 0) {
        throw InvalidCluster("cluster dimensionality must be at least 1");
    }
    if (values_.size() != rows_ * dim_) {
        throw InvalidCluster("cluster storage holds " + std::to_string(values_.size()) +
                             " values, expected " + std::to_string(rows_ * dim_));
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            throw InvalidCluster("non-finite value at row " + std::to_string(k / dim_) +
                                 ", axis " + std::to_string(k % dim_));
        }
    }
}

EmbeddedCluster EmbeddedCluster::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t dim = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) {
            throw InvalidCluster("row " + std::to_string(i) + " has length " +
                                 std::to_string(rows[i].size()) + ", expected " +
                                 std::to_string(dim));
        }
        values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return EmbeddedCluster(rows.size(), dim, std::move(values));
}

EmbeddedCluster EmbeddedCluster::select(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    values.reserve(indices.size() * dim_);
    for (std::size_t i : indices) {
        if (i >= rows_) throw InvalidCluster("row index " + std::to_string(i) + " out of range");
        const auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
    }
    return EmbeddedCluster(indices.size(), dim_, std::move(values));
}

EmbeddedCluster EmbeddedCluster::concat(const EmbeddedCluster& other) const {
    if (empty()) return other;
    if (other.empty()) return *this;
    if (other.dim_ != dim_) {
        throw InvalidCluster("cannot concatenate clusters of dimension " + std::to_string(dim_) +
                             " and " + std::to_string(other.dim_));
    }
    std::vector<double> values = values_;
    values.insert(values.end(), other.values_.begin(), other.values_.end());
    return EmbeddedCluster(rows_ + other.rows_, dim_, std::move(values));
}

}  // namespace textchar
