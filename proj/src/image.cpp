#include <cstdio>
#include <filesystem>

#include "qrwd/io.hpp"

namespace qrwd {

void atomic_write(const std::string& path, const std::string& bytes) {
    std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw RangeError("atomic_write: cannot open " + tmp);
    bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
    ok = (std::fclose(f) == 0) && ok;
    if (!ok) throw RangeError("atomic_write: short write to " + tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw RangeError("atomic_write: rename failed for " + path);
}

namespace {

// fixed 16-entry escape palette (documented in the README)
constexpr unsigned char kPalette[16][3] = {
    {66, 30, 15},   {25, 7, 26},    {9, 1, 47},     {4, 4, 73},
    {0, 7, 100},    {12, 44, 138},  {24, 82, 177},  {57, 125, 209},
    {134, 181, 229},{211, 236, 248},{241, 233, 191},{248, 201, 95},
    {255, 170, 0},  {204, 128, 0},  {153, 87, 0},   {106, 52, 3}};

}  // namespace

std::string encode_ppm(const EscapeField& field) {
    std::string out = "P6\n" + std::to_string(field.nx) + " " + std::to_string(field.ny) +
                      "\n255\n";
    out.reserve(out.size() + std::size_t(field.nx) * field.ny * 3);
    // rows top-to-bottom
    for (int j = field.ny - 1; j >= 0; --j) {
        for (int i = 0; i < field.nx; ++i) {
            int c = field.counts[std::size_t(j) * field.nx + i];
            unsigned char rgb[3] = {0, 0, 0};  // interior: black
            if (c >= 0) {
                const unsigned char* p = kPalette[c % 16];
                rgb[0] = p[0];
                rgb[1] = p[1];
                rgb[2] = p[2];
            }
            out.append(reinterpret_cast<const char*>(rgb), 3);
        }
    }
    return out;
}

void write_image(const EscapeField& field, const std::string& path) {
    atomic_write(path, encode_ppm(field));
}

}  // namespace qrwd
