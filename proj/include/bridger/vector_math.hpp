#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "bridger/types.hpp"

namespace bridger {

template <typename A, typename B>
double dot(std::span<const A> u, std::span<const B> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<double>(u[i]) * static_cast<double>(v[i]);
    return s;
}

template <typename A>
double norm(std::span<const A> u) {
    return std::sqrt(dot(u, u));
}

template <typename A, typename B>
double euclidean_distance(std::span<const A> u, std::span<const B> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = static_cast<double>(u[i]) - static_cast<double>(v[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

// dot(u,v) / (|u| |v|), clamped to [-1, 1]. Throws zero_vector when either side has zero norm and
// dimension_mismatch on unequal lengths.
template <typename A, typename B>
double cosine(std::span<const A> u, std::span<const B> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorCode::dimension_mismatch, "cosine over vectors of unequal dimension");
    }
    const double nu = dot(u, u);
    const double nv = dot(v, v);
    if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::zero_vector, "cosine of a zero vector");
    const double c = dot(u, v) / (std::sqrt(nu) * std::sqrt(nv));
    return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    return cosine(std::span<const double>(u), std::span<const double>(v));
}

}  // namespace bridger
