#include "ecglab/signal_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ecglab::io {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'C', 'G', '1'};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    os.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw std::runtime_error("unexpected end of file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw std::runtime_error("unexpected end of file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return std::bit_cast<double>(v);
}

void write_text(std::ostream& os, const Signal& s) {
    os << "fs=" << s.fs() << '\n';
    char buf[32];
    for (double v : s.samples()) {
        const int n = std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os.write(buf, n);
    }
}

Signal read_text(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("signal text: missing header");
    line = trim(line);
    if (line.rfind("fs=", 0) != 0) throw std::runtime_error("signal text: header must be fs=<int>, got '" + line + "'");
    int fs = 0;
    const auto* begin = line.data() + 3;
    const auto* end = line.data() + line.size();
    if (auto [p, ec] = std::from_chars(begin, end, fs); ec != std::errc{} || p != end) {
        throw std::runtime_error("signal text: bad sampling rate '" + line + "'");
    }
    std::vector<double> samples;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            samples.push_back(std::stod(line, &used));
            if (used != line.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::runtime_error("signal text: line " + std::to_string(lineno) + " is not a number: '" + line + "'");
        }
    }
    return {std::move(samples), fs};
}

void write_binary(std::ostream& os, const Signal& s) {
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, static_cast<std::uint32_t>(s.fs()));
    for (double v : s.samples()) put_f64(os, v);
}

Signal read_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("signal binary: bad magic");
    const auto fs = get_u32(is);
    std::vector<double> samples;
    while (is.peek() != std::char_traits<char>::eof()) samples.push_back(get_f64(is));
    return {std::move(samples), static_cast<int>(fs)};
}

void save(const std::filesystem::path& path, const Signal& s) {
    const auto ext = path.extension().string();
    const bool binary = ext == ".bin" || ext == ".ecg1";
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    binary ? write_binary(os, s) : write_text(os, s);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

Signal load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::array<char, 4> head{};
    is.read(head.data(), head.size());
    const bool binary = is.gcount() == 4 && head == kMagic;
    is.clear();
    is.seekg(0);
    try {
        return binary ? read_binary(is) : read_text(is);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace ecglab::io
