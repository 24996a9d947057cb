#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace textchar {

/// An m x H block of finite embedding coordinates, stored row-major.
///
/// Construction validates shape and finiteness; afterwards the cluster is
/// immutable and can be shared across threads for reading.
class EmbeddedCluster {
public:
    EmbeddedCluster() = default;

    /// Takes ownership of `values` (size must equal rows * dim).
    EmbeddedCluster(std::size_t rows, std::size_t dim, std::vector<double> values);

    static EmbeddedCluster from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// New cluster holding the given rows, in the given order.
    EmbeddedCluster select(std::span<const std::size_t> indices) const;

    /// Rows of `this` followed by rows of `other`; dims must agree.
    EmbeddedCluster concat(const EmbeddedCluster& other) const;

    friend bool operator==(const EmbeddedCluster&, const EmbeddedCluster&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

}  // namespace textchar
