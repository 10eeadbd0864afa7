#pragma once

#include <cstddef>

namespace permuquant {

// Contiguous partition of d channels into groups of g consecutive indices;
// g must divide d.
class Grouping {
public:
    Grouping(std::size_t d, std::size_t g);  // throws std::invalid_argument

    std::size_t d() const { return d_; }
    std::size_t g() const { return g_; }
    std::size_t num_groups() const { return d_ / g_; }
    std::size_t begin(std::size_t k) const { return k * g_; }
    std::size_t end(std::size_t k) const { return (k + 1) * g_; }

private:
    std::size_t d_;
    std::size_t g_;
};

}  // namespace permuquant
