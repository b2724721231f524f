#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rignn/array.hpp"

// Little-endian binary container helpers shared by the bundle, topic-model
// and checkpoint formats. Every file starts with a 4-byte magic and a u32
// version; readers reject anything else.
namespace rignn::io {

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for write: " + path);
    }

    void magic(const char tag[4], std::uint32_t version) {
        out_.write(tag, 4);
        u32(version);
    }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i64(std::int64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void f64_vec(const std::vector<double>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(double));
    }
    void u32_vec(const std::vector<std::uint32_t>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(std::uint32_t));
    }
    void array(const Array& a) {
        u64(a.shape.size());
        for (auto d : a.shape) u64(d);
        raw(a.data.data(), a.data.size() * sizeof(double));
    }

private:
    void raw(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!out_) throw std::runtime_error("write failed");
    }
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for read: " + path);
    }

    std::uint32_t magic(const char tag[4]) {
        char got[4];
        raw(got, 4);
        if (std::memcmp(got, tag, 4) != 0)
            throw std::runtime_error("bad file magic, expected " +
                                     std::string(tag, 4));
        return u32();
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    std::string str() {
        std::string s(u64(), '\0');
        raw(s.data(), s.size());
        return s;
    }
    std::vector<double> f64_vec() {
        std::vector<double> v(u64());
        raw(v.data(), v.size() * sizeof(double));
        return v;
    }
    std::vector<std::uint32_t> u32_vec() {
        std::vector<std::uint32_t> v(u64());
        raw(v.data(), v.size() * sizeof(std::uint32_t));
        return v;
    }
    Array array() {
        std::vector<std::size_t> shape(u64());
        for (auto& d : shape) d = u64();
        Array a(shape);
        raw(a.data.data(), a.data.size() * sizeof(double));
        return a;
    }

private:
    void raw(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw std::runtime_error("truncated file");
    }
    std::ifstream in_;
};

}  // namespace rignn::io
