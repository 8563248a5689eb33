#include "sketchavg/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <system_error>

#include "sketchavg/errors.hpp"

namespace sketchavg {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'K', 'M'};

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

void put_f64_le(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64_le(out, bits);
}

double get_f64_le(const unsigned char* p) {
    std::uint64_t bits = get_u64_le(p);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path);
    return content;
}

Matrix parse_binary(const std::string& raw, const std::string& path) {
    if (raw.size() < 20) throw IoError(path + ": truncated binary header");
    const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
    std::uint64_t rows = get_u64_le(p + 4);
    std::uint64_t cols = get_u64_le(p + 12);
    if (rows == 0 || cols == 0) throw IoError(path + ": empty matrix");
    if (rows > (1ULL << 32) || cols > (1ULL << 32) || rows * cols > (raw.size() - 20) / 8 + 1)
        throw IoError(path + ": implausible dimensions");
    std::size_t need = 20 + 8 * static_cast<std::size_t>(rows * cols);
    if (raw.size() != need)
        throw IoError(path + ": expected " + std::to_string(need) + " bytes, got " +
                      std::to_string(raw.size()));
    Vector data(rows * cols);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = get_f64_le(p + 20 + 8 * i);
    Matrix m = Matrix::from_data(rows, cols, std::move(data));
    ensure_finite(m, path.c_str());
    return m;
}

Matrix parse_csv(const std::string& raw, const std::string& path) {
    Vector data;
    std::size_t rows = 0, cols = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        if (eol == std::string::npos) eol = raw.size();
        std::size_t end = eol;
        if (end > pos && raw[end - 1] == '\r') --end;
        ++line_no;
        if (end > pos) {
            std::size_t row_cols = 0;
            std::size_t cur = pos;
            while (cur <= end) {
                std::size_t comma = raw.find(',', cur);
                if (comma == std::string::npos || comma > end) comma = end;
                std::size_t a = cur, b = comma;
                while (a < b && (raw[a] == ' ' || raw[a] == '\t')) ++a;
                while (b > a && (raw[b - 1] == ' ' || raw[b - 1] == '\t')) --b;
                double v;
                auto res = std::from_chars(raw.data() + a, raw.data() + b, v);
                if (res.ec != std::errc() || res.ptr != raw.data() + b)
                    throw IoError(path + ":" + std::to_string(line_no) + ": bad number '" +
                                  raw.substr(a, b - a) + "'");
                data.push_back(v);
                ++row_cols;
                if (comma == end) break;
                cur = comma + 1;
            }
            if (rows == 0)
                cols = row_cols;
            else if (row_cols != cols)
                throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(cols) + " columns, got " + std::to_string(row_cols));
            ++rows;
        }
        pos = eol + 1;
    }
    if (rows == 0) throw IoError(path + ": no data rows");
    Matrix m = Matrix::from_data(rows, cols, std::move(data));
    ensure_finite(m, path.c_str());
    return m;
}

bool wants_csv(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

void write_raw(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Matrix read_matrix(const std::string& path) {
    std::string raw = slurp(path);
    if (raw.size() >= 4 && std::memcmp(raw.data(), kMagic, 4) == 0)
        return parse_binary(raw, path);
    return parse_csv(raw, path);
}

void write_matrix(const std::string& path, const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw IoError("refusing to write empty matrix");
    ensure_finite(m, "write_matrix");
    std::string bytes;
    if (wants_csv(path)) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (j) bytes.push_back(',');
                bytes += format_double(m(i, j));
            }
            bytes.push_back('\n');
        }
    } else {
        bytes.assign(kMagic, 4);
        put_u64_le(bytes, m.rows());
        put_u64_le(bytes, m.cols());
        for (double v : m.data()) put_f64_le(bytes, v);
    }
    write_raw(path, bytes);
}

Vector read_vector(const std::string& path) {
    Matrix m = read_matrix(path);
    if (m.cols() == 1 || m.rows() == 1) return m.data();
    throw IoError(path + ": expected a vector, got " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()));
}

void write_vector(const std::string& path, const Vector& v) {
    write_matrix(path, Matrix::from_data(v.size(), 1, v));
}

}  // namespace sketchavg
