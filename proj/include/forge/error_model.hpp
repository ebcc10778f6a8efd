#pragma once

#include <string>
#include <utility>

#include "forge/rng.hpp"
#include "forge/stabilizer.hpp"

namespace forge {

// Physical error rates. p_s is carried for configuration completeness but
// does not enter any effective rate (it multiplies no process in the
// effective-rate derivation).
struct ErrorModelParams {
    double p_q = 0;     // single-qubit gate on the emitter
    double p_s = 0;     // single-qubit gate on photons
    double p_t = 0;     // emitter error preceding its readout
    double p_f = 0;     // photon error preceding the final X measurement
    double p_2q = 0;    // emission CNOT
    double p_2 = 0;     // scattering CZ
    double p_loss = 0;  // erasure per photon

    static ErrorModelParams uniform(double p, double p_loss = 0);
    std::string to_json() const;
    static ErrorModelParams from_json(const std::string& text);
};

// Per-edge flip rates by syndrome-edge direction plus correlated-pair rates.
// The first subscript letter is the edge direction, the second the direction
// separating the pair.
struct EffectiveRates {
    double q_x = 0, q_y = 0, q_z = 0;
    double q_yz = 0, q_zy = 0, q_xy = 0, q_xz = 0;

    double by_direction(int axis) const { return axis == 0 ? q_x : (axis == 1 ? q_y : q_z); }
    // True when every rate sits below 1/2, the domain of the weight formula.
    bool weight_domain_ok() const;
};

EffectiveRates effective_rates(const ErrorModelParams& p);

Pauli depolarize1(double p, Rng& rng);
std::pair<Pauli, Pauli> depolarize2(double p, Rng& rng);

// Probability that an odd number of (n_x, n_y, n_z) independent edges flip.
template <typename T>
T supercheck_rate_generic(int n_x, int n_y, int n_z, T q_x, T q_y, T q_z) {
    if (n_x == 0 && n_y == 0 && n_z == 0) return T(0);
    T acc(1);
    const T one(1), two(2);
    for (int i = 0; i < n_x; ++i) acc = acc * (one - two * q_x);
    for (int i = 0; i < n_y; ++i) acc = acc * (one - two * q_y);
    for (int i = 0; i < n_z; ++i) acc = acc * (one - two * q_z);
    return (one - acc) / two;
}

double supercheck_rate(int n_x, int n_y, int n_z, const EffectiveRates& r);

// w = ln((1-q)/q). Rates at or below q_min are capped there so lost-free
// graphs keep finite weights; q > 1/2 is outside the formula's domain.
double edge_weight(double q, double q_min = 1e-12);

// Cumulative erasure probability of a delay-line spool holding L^2 qubits.
// lambda in dB/km, v in m/s, tau in seconds.
double fiber_loss(double lambda_db_per_km, double v_m_per_s, double tau_s, double l);

// Largest lattice whose spool loss stays below the percolation bound.
double l_max(double lambda_db_per_km, double v_m_per_s, double tau_s, double p_perc);

}  // namespace forge
