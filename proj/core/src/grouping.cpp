#include "permuquant/grouping.hpp"

#include <stdexcept>

namespace permuquant {

Grouping::Grouping(std::size_t d, std::size_t g) : d_(d), g_(g) {
    if (d == 0) throw std::invalid_argument("grouping: d must be positive");
    if (g == 0) throw std::invalid_argument("grouping: g must be positive");
    if (d % g != 0) throw std::invalid_argument("grouping: g must divide d");
}

}  // namespace permuquant
