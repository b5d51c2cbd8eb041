#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "fno/util.hpp"
#include "fno/words.hpp"

namespace fno {

/// Atom of a trigonometric path derivative: amp * e^{i k delta_xi x}.
/// Frequencies live on an integer grid so resonances are detected exactly.
struct Atom {
    int k;  // nonzero grid index; frequency = k * delta_xi
    cplx amp;
};

/// d-component path with explicitly listed derivative atoms per component.
/// Components need not be Hermitian; values may be complex.
struct AtomicPath {
    double delta_xi = 1.0;
    std::vector<std::vector<Atom>> atoms;  // per component

    int dims() const { return static_cast<int>(atoms.size()); }
};

/// Finite sum  sum_j p_j(x) e^{i omega_j x}  with polynomial coefficients
/// and integer-grid frequencies, closed under antiderivatives: a nonzero
/// frequency integrates into 1/(i omega) factors, the zero frequency grows
/// the polynomial degree. This is the oracle ring for nested integrals of
/// trigonometric paths; no quadrature is involved.
class ExpPoly {
  public:
    ExpPoly() = default;

    static ExpPoly constant(cplx c) {
        ExpPoly p;
        if (c != cplx{}) p.terms_[0] = {c};
        return p;
    }

    static ExpPoly atom(const Atom& a) {
        ExpPoly p;
        p.terms_[a.k] = {a.amp};
        return p;
    }

    bool empty() const { return terms_.empty(); }

    ExpPoly& operator+=(const ExpPoly& o) {
        for (const auto& [k, coef] : o.terms_) {
            auto& mine = terms_[k];
            if (mine.size() < coef.size()) mine.resize(coef.size(), cplx{});
            for (std::size_t m = 0; m < coef.size(); ++m) mine[m] += coef[m];
        }
        return *this;
    }

    ExpPoly operator*(const ExpPoly& o) const {
        ExpPoly out;
        for (const auto& [ka, pa] : terms_)
            for (const auto& [kb, pb] : o.terms_) {
                auto& dst = out.terms_[ka + kb];
                if (dst.size() < pa.size() + pb.size() - 1) dst.resize(pa.size() + pb.size() - 1, cplx{});
                for (std::size_t i = 0; i < pa.size(); ++i)
                    for (std::size_t j = 0; j < pb.size(); ++j) dst[i + j] += pa[i] * pb[j];
            }
        return out;
    }

    /// F(x) = int_s^x of this, as an ExpPoly in x.
    ExpPoly integral_from(double s, double delta_xi) const {
        ExpPoly F;
        for (const auto& [k, coef] : terms_) {
            if (k == 0) {
                // plain polynomial: raise the degree
                auto& dst = F.terms_[0];
                if (dst.size() < coef.size() + 1) dst.resize(coef.size() + 1, cplx{});
                for (std::size_t m = 0; m < coef.size(); ++m)
                    dst[m + 1] += coef[m] / static_cast<double>(m + 1);
            } else {
                // repeated integration by parts:
                // int x^m e^{iwx} = e^{iwx} sum_{r<=m} (-1)^r m!/(m-r)! x^{m-r} / (iw)^{r+1}
                const cplx iw{0.0, k * delta_xi};
                auto& dst = F.terms_[k];
                if (dst.size() < coef.size()) dst.resize(coef.size(), cplx{});
                for (std::size_t m = 0; m < coef.size(); ++m) {
                    cplx fac = coef[m];
                    double falling = 1.0;
                    for (std::size_t r = 0; r <= m; ++r) {
                        fac /= iw;
                        dst[m - r] += (r % 2 ? -1.0 : 1.0) * falling * fac;
                        falling *= static_cast<double>(m - r);
                    }
                }
            }
        }
        cplx at_s = F.eval(s, delta_xi);
        if (at_s != cplx{}) {
            auto& c0 = F.terms_[0];
            if (c0.empty()) c0.resize(1, cplx{});
            c0[0] -= at_s;
        }
        return F;
    }

    cplx eval(double x, double delta_xi) const {
        cplx v{};
        for (const auto& [k, coef] : terms_) {
            cplx poly{};
            for (std::size_t m = coef.size(); m-- > 0;) poly = poly * x + coef[m];
            if (k == 0) v += poly;
            else v += poly * std::exp(cplx{0.0, k * delta_xi * x});
        }
        return v;
    }

    std::size_t term_count() const { return terms_.size(); }

  private:
    std::map<int, std::vector<cplx>> terms_;  // frequency index -> poly coefficients
};

/// Exact nested integral
///   int_s^t dG(l_1) int_s^{x_1} dG(l_2) ... int_s^{x_{n-1}} dG(l_n)
/// over the atom tables given per slot (innermost slot last). Resonances
/// are handled exactly by the zero-frequency branch.
inline cplx oracle_nested_integral(const std::vector<std::vector<Atom>>& slot_atoms,
                                   double delta_xi, double s, double t) {
    if (slot_atoms.empty()) throw std::invalid_argument("oracle_nested_integral: no slots");
    ExpPoly inner = ExpPoly::constant(1.0);
    for (std::size_t slot = slot_atoms.size(); slot-- > 0;) {
        ExpPoly deriv;
        for (const Atom& a : slot_atoms[slot]) {
            if (a.k == 0) throw std::invalid_argument("oracle_nested_integral: zero frequency atom");
            deriv += ExpPoly::atom(a);
        }
        inner = (slot + 1 == slot_atoms.size()) ? deriv : deriv * inner;
        inner = inner.integral_from(s, delta_xi);
    }
    return inner.eval(t, delta_xi);
}

/// Same integral for a path and an index word.
inline cplx oracle_iterated_integral(const AtomicPath& p, const Word& w, double s, double t) {
    if (w.empty() || w.size() > 5)
        throw std::invalid_argument("oracle_iterated_integral: word length must be 1..5");
    std::vector<std::vector<Atom>> slots;
    slots.reserve(w.size());
    for (int letter : w) {
        if (letter < 1 || letter > p.dims())
            throw std::invalid_argument("oracle_iterated_integral: letter out of range");
        slots.push_back(p.atoms[letter - 1]);
    }
    return oracle_nested_integral(slots, p.delta_xi, s, t);
}

}  // namespace fno
