#pragma once

// Little-endian primitive encoding shared by the .emb and .bsnap formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bridger/types.hpp"

namespace bridger::detail {

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    template <typename T>
    void put_uint(T value) {
        unsigned char bytes[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bytes[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu);
        }
        out_.write(reinterpret_cast<const char*>(bytes), sizeof(T));
    }
    void put_u8(std::uint8_t v) { put_uint(v); }
    void put_u16(std::uint16_t v) { put_uint(v); }
    void put_u32(std::uint32_t v) { put_uint(v); }
    void put_u64(std::uint64_t v) { put_uint(v); }
    void put_i32(std::int32_t v) { put_uint(static_cast<std::uint32_t>(v)); }
    void put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }
    void put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }
    void put_bool(bool v) { put_u8(v ? 1 : 0); }
    void put_string(const std::string& s) {
        put_u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void put_bytes(const char* data, std::size_t n) {
        out_.write(data, static_cast<std::streamsize>(n));
    }

private:
    std::ostream& out_;
};

class BinaryReader {
public:
    BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    template <typename T>
    T get_uint() {
        unsigned char bytes[sizeof(T)];
        read(reinterpret_cast<char*>(bytes), sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        return static_cast<T>(v);
    }
    std::uint8_t get_u8() { return get_uint<std::uint8_t>(); }
    std::uint16_t get_u16() { return get_uint<std::uint16_t>(); }
    std::uint32_t get_u32() { return get_uint<std::uint32_t>(); }
    std::uint64_t get_u64() { return get_uint<std::uint64_t>(); }
    std::int32_t get_i32() { return static_cast<std::int32_t>(get_u32()); }
    float get_f32() { return std::bit_cast<float>(get_u32()); }
    double get_f64() { return std::bit_cast<double>(get_u64()); }
    bool get_bool() { return get_u8() != 0; }
    std::string get_string() {
        auto n = get_u64();
        if (n > (1ull << 32)) fail("implausible string length");
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }
    void read(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) fail("unexpected end of file");
    }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::parse_error, source_ + ": " + what);
    }

private:
    std::istream& in_;
    std::string source_;
};

}  // namespace bridger::detail
