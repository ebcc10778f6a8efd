#pragma once

// Dense state-vector simulator used as an independent oracle for the
// stabilizer tableau. Exponential in qubit count; keep n <= ~12.

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "forge/rng.hpp"
#include "forge/stabilizer.hpp"

namespace forge::testing {

class StateVector {
  public:
    using cplx = std::complex<double>;

    explicit StateVector(int n) : n_(n), amp_(size_t(1) << n, cplx(0.0, 0.0)) { amp_[0] = 1.0; }

    int num_qubits() const { return n_; }
    const std::vector<cplx>& amplitudes() const { return amp_; }

    void apply(Gate g, int a) {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const cplx i(0.0, 1.0);
        switch (g) {
            case Gate::H: one_qubit(a, inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2); break;
            case Gate::X: one_qubit(a, 0, 1, 1, 0); break;
            case Gate::Y: one_qubit(a, 0, -i, i, 0); break;
            case Gate::Z: one_qubit(a, 1, 0, 0, -1); break;
            case Gate::S: one_qubit(a, 1, 0, 0, i); break;
            case Gate::SqrtIX: one_qubit(a, inv_sqrt2, i * inv_sqrt2, i * inv_sqrt2, inv_sqrt2); break;
            case Gate::SqrtIXd: one_qubit(a, inv_sqrt2, -i * inv_sqrt2, -i * inv_sqrt2, inv_sqrt2); break;
            case Gate::SqrtIZ: one_qubit(a, std::polar(1.0, M_PI / 4), 0, 0, std::polar(1.0, -M_PI / 4)); break;
            case Gate::SqrtIZd: one_qubit(a, std::polar(1.0, -M_PI / 4), 0, 0, std::polar(1.0, M_PI / 4)); break;
            default: throw std::invalid_argument("one-qubit gate expected");
        }
    }

    void apply(Gate g, int a, int b) {
        const size_t ma = size_t(1) << a, mb = size_t(1) << b;
        switch (g) {
            case Gate::CZ:
                for (size_t k = 0; k < amp_.size(); ++k)
                    if ((k & ma) && (k & mb)) amp_[k] = -amp_[k];
                break;
            case Gate::ScatterCZ:
                // X_L CZ X_L with L = a, R = b: sign flip on |0_L 1_R>.
                for (size_t k = 0; k < amp_.size(); ++k)
                    if (!(k & ma) && (k & mb)) amp_[k] = -amp_[k];
                break;
            case Gate::CNOT:
                for (size_t k = 0; k < amp_.size(); ++k)
                    if ((k & ma) && !(k & mb)) std::swap(amp_[k], amp_[k | mb]);
                break;
            default: throw std::invalid_argument("two-qubit gate expected");
        }
    }

    // Apply the Hermitian Pauli given by (x, z, sign) bit rows of a tableau.
    void apply_pauli_row(const StabilizerState& s, int row) {
        const int n = s.num_qubits();
        std::vector<cplx> out(amp_.size());
        for (size_t k = 0; k < amp_.size(); ++k) {
            size_t k2 = k;
            cplx factor = s.phase_bit(row) ? cplx(-1, 0) : cplx(1, 0);
            for (int q = 0; q < n; ++q) {
                bool xb = s.x_bit(row, q), zb = s.z_bit(row, q);
                bool bitval = (k >> q) & 1;
                if (xb && zb) {  // Y
                    factor *= bitval ? cplx(0, -1) : cplx(0, 1);
                    k2 ^= size_t(1) << q;
                } else if (xb) {
                    k2 ^= size_t(1) << q;
                } else if (zb) {
                    if (bitval) factor = -factor;
                }
            }
            out[k2] += factor * amp_[k];
        }
        amp_ = std::move(out);
    }

    int measure(Pauli p, int qubit, Rng& rng) {
        // Rotate so the measurement is Z, measure, rotate back.
        auto basis_in = [&]() {
            if (p == Pauli::X) apply(Gate::H, qubit);
            if (p == Pauli::Y) { apply(Gate::SqrtIXd, qubit); }
        };
        auto basis_out = [&]() {
            if (p == Pauli::X) apply(Gate::H, qubit);
            if (p == Pauli::Y) { apply(Gate::SqrtIX, qubit); }
        };
        basis_in();
        double p0 = 0;
        const size_t m = size_t(1) << qubit;
        for (size_t k = 0; k < amp_.size(); ++k)
            if (!(k & m)) p0 += std::norm(amp_[k]);
        int outcome = rng.uniform() < p0 ? +1 : -1;
        double norm = std::sqrt(outcome > 0 ? p0 : 1 - p0);
        for (size_t k = 0; k < amp_.size(); ++k) {
            bool one = (k & m) != 0;
            if (one == (outcome > 0))
                amp_[k] = 0;
            else
                amp_[k] /= norm;
        }
        basis_out();
        return outcome;
    }

    double probability_of(Pauli p, int qubit, int outcome) const {
        StateVector copy = *this;
        if (p == Pauli::X) copy.apply(Gate::H, qubit);
        if (p == Pauli::Y) copy.apply(Gate::SqrtIXd, qubit);
        double p0 = 0;
        const size_t m = size_t(1) << qubit;
        for (size_t k = 0; k < copy.amp_.size(); ++k)
            if (!(k & m)) p0 += std::norm(copy.amp_[k]);
        return outcome > 0 ? p0 : 1 - p0;
    }

    void normalize() {
        double s = 0;
        for (auto& a : amp_) s += std::norm(a);
        if (s < 1e-12) throw std::runtime_error("null state");
        s = std::sqrt(s);
        for (auto& a : amp_) a /= s;
    }

    // |<this|other>| after normalization; 1 means equal up to global phase.
    double overlap(const StateVector& other) const {
        assert(n_ == other.n_);
        cplx acc = 0;
        for (size_t k = 0; k < amp_.size(); ++k) acc += std::conj(amp_[k]) * other.amp_[k];
        return std::abs(acc);
    }

    // Reconstruct the (unique) state fixed by all rows of a stabilizer tableau.
    static StateVector from_stabilizer(const StabilizerState& s) {
        StateVector v(s.num_qubits());
        Rng rng(0xfeedfaceULL);
        for (auto& a : v.amp_) a = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
        for (int r = 0; r < s.num_qubits(); ++r) {
            StateVector pv = v;
            pv.apply_pauli_row(s, r);
            for (size_t k = 0; k < v.amp_.size(); ++k) v.amp_[k] = 0.5 * (v.amp_[k] + pv.amp_[k]);
        }
        v.normalize();
        return v;
    }

  private:
    void one_qubit(int q, cplx a, cplx b, cplx c, cplx d) {
        const size_t m = size_t(1) << q;
        for (size_t k = 0; k < amp_.size(); ++k) {
            if (k & m) continue;
            cplx v0 = amp_[k], v1 = amp_[k | m];
            amp_[k] = a * v0 + b * v1;
            amp_[k | m] = c * v0 + d * v1;
        }
    }

    int n_;
    std::vector<cplx> amp_;
};

}  // namespace forge::testing
