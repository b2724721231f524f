#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rignn/rng.hpp"

namespace rignn {

// Dense row-major 64-bit array. Rank 1 or 2 is all the model needs.
struct Array {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Array() = default;
    explicit Array(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel(shape), 0.0);
    }
    Array(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel(shape))
            throw std::invalid_argument("array: data/shape mismatch");
    }

    static std::size_t numel(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (auto d : s) n *= d;
        return n;
    }

    static Array zeros(std::size_t r, std::size_t c) { return Array({r, c}); }
    static Array vec(std::vector<double> d) {
        std::vector<std::size_t> s{d.size()};
        return Array(std::move(s), std::move(d));
    }

    std::size_t size() const { return data.size(); }
    std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? (shape.empty() ? 1 : shape[0]) : shape[1]; }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

    bool same_shape(const Array& o) const { return shape == o.shape; }

    void fill(double v) { data.assign(data.size(), v); }

    void fill_uniform(Rng& rng, double lo, double hi) {
        for (auto& x : data) x = rng.uniform(lo, hi);
    }

    void check_finite(const char* where) const {
        for (double v : data)
            if (!std::isfinite(v))
                throw std::runtime_error(std::string("non-finite value in ") + where);
    }

    static std::string shape_str(const std::vector<std::size_t>& s) {
        std::string out = "(";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(s[i]);
        }
        return out + ")";
    }
};

}  // namespace rignn
