#pragma once

#include "asymptolab/core.hpp"

#include <vector>

namespace asymptolab {

// complex coefficients, constant term first
struct Polynomial {
    std::vector<cplx> c;

    Polynomial() = default;
    Polynomial(std::initializer_list<cplx> l) : c(l) {}
    explicit Polynomial(std::vector<cplx> v) : c(std::move(v)) {}

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (c[i] != cplx{}) return i;
        return -1; // zero polynomial
    }

    cplx operator()(cplx z) const {
        cplx s{};
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
        return s;
    }

    static Polynomial constant(cplx v) { return Polynomial{v}; }
};

} // namespace asymptolab
