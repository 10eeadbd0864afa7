#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "permuquant/matrix.hpp"

namespace permuquant {

// File or serialization problem: unreadable path, bad header, malformed
// JSON. The CLI maps these to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

// PQT1 container, little-endian throughout:
//   bytes 0-3   magic "PQT1"
//   byte  4     dtype: 0 = f32, 1 = f64
//   byte  5     ndim, must be 2
//   bytes 6-7   reserved, must be zero
//   then ndim u64 dims, then the row-major payload.
// Loading widens f32 to double and rejects non-finite values.
Matrix load_tensor(const std::filesystem::path& path);

void save_tensor(const std::filesystem::path& path, const Matrix& m,
                 DType dtype = DType::f64);

}  // namespace permuquant
