#include "permuquant/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace permuquant {

namespace {

constexpr std::size_t kHeaderBytes = 8;
constexpr unsigned char kMagic[4] = {'P', 'Q', 'T', '1'};

std::uint64_t read_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void write_u64_le(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

}  // namespace

Matrix load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("tensor: cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("tensor: read failed on " + path.string());

    if (buf.size() < kHeaderBytes) {
        throw IoError("tensor: truncated header in " + path.string());
    }
    if (std::memcmp(buf.data(), kMagic, 4) != 0) {
        throw IoError("tensor: bad magic in " + path.string());
    }
    const unsigned char dtype_byte = buf[4];
    if (dtype_byte != 0 && dtype_byte != 1) {
        throw IoError("tensor: unknown dtype in " + path.string());
    }
    if (buf[5] != 2) {
        throw IoError("tensor: expected 2 dims in " + path.string());
    }
    if (buf[6] != 0 || buf[7] != 0) {
        throw IoError("tensor: corrupt header in " + path.string());
    }
    if (buf.size() < kHeaderBytes + 16) {
        throw IoError("tensor: truncated header in " + path.string());
    }
    const std::uint64_t rows = read_u64_le(buf.data() + kHeaderBytes);
    const std::uint64_t cols = read_u64_le(buf.data() + kHeaderBytes + 8);
    const std::size_t esize = dtype_byte == 0 ? 4 : 8;

    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
    if (cols != 0 && rows > limit / cols) {
        throw IoError("tensor: dim overflow in " + path.string());
    }
    const std::uint64_t count = rows * cols;
    if (count > limit / esize) {
        throw IoError("tensor: dim overflow in " + path.string());
    }
    const std::uint64_t payload = count * esize;
    const std::uint64_t have = buf.size() - (kHeaderBytes + 16);
    if (have < payload) {
        throw IoError("tensor: truncated payload in " + path.string());
    }
    if (have > payload) {
        throw IoError("tensor: trailing bytes after payload in " + path.string());
    }

    std::vector<double> data(static_cast<std::size_t>(count));
    const unsigned char* p = buf.data() + kHeaderBytes + 16;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (esize == 4) {
            std::uint32_t u = 0;
            for (int b = 3; b >= 0; --b) u = (u << 8) | p[i * 4 + b];
            data[i] = static_cast<double>(std::bit_cast<float>(u));
        } else {
            data[i] = std::bit_cast<double>(read_u64_le(p + i * 8));
        }
        if (!std::isfinite(data[i])) {
            throw IoError("tensor: non-finite value in " + path.string());
        }
    }
    return Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                  std::move(data));
}

void save_tensor(const std::filesystem::path& path, const Matrix& m, DType dtype) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("tensor: cannot create " + path.string());

    unsigned char header[kHeaderBytes] = {};
    std::memcpy(header, kMagic, 4);
    header[4] = static_cast<unsigned char>(dtype);
    header[5] = 2;
    out.write(reinterpret_cast<const char*>(header), kHeaderBytes);
    write_u64_le(out, m.rows());
    write_u64_le(out, m.cols());

    if (dtype == DType::f32) {
        for (double v : m.data()) {
            const std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
            unsigned char buf[4];
            for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
            out.write(reinterpret_cast<const char*>(buf), 4);
        }
    } else {
        for (double v : m.data()) {
            write_u64_le(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    out.flush();
    if (!out) throw IoError("tensor: write failed on " + path.string());
}

}  // namespace permuquant
