#include "forge/error_model.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace forge {

ErrorModelParams ErrorModelParams::uniform(double p, double p_loss) {
    ErrorModelParams out;
    out.p_q = out.p_s = out.p_t = out.p_f = out.p_2q = out.p_2 = p;
    out.p_loss = p_loss;
    return out;
}

std::string ErrorModelParams::to_json() const {
    nlohmann::json j;
    j["p_q"] = p_q;
    j["p_s"] = p_s;
    j["p_t"] = p_t;
    j["p_f"] = p_f;
    j["p_2q"] = p_2q;
    j["p_2"] = p_2;
    j["p_loss"] = p_loss;
    return j.dump();
}

ErrorModelParams ErrorModelParams::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ErrorModelParams p;
    if (j.contains("uniform")) p = uniform(j.at("uniform").get<double>());
    if (j.contains("p_q")) p.p_q = j.at("p_q").get<double>();
    if (j.contains("p_s")) p.p_s = j.at("p_s").get<double>();
    if (j.contains("p_t")) p.p_t = j.at("p_t").get<double>();
    if (j.contains("p_f")) p.p_f = j.at("p_f").get<double>();
    if (j.contains("p_2q")) p.p_2q = j.at("p_2q").get<double>();
    if (j.contains("p_2")) p.p_2 = j.at("p_2").get<double>();
    if (j.contains("p_loss")) p.p_loss = j.at("p_loss").get<double>();
    auto valid = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (double v : {p.p_q, p.p_s, p.p_t, p.p_f, p.p_2q, p.p_2, p.p_loss})
        if (!valid(v)) throw std::invalid_argument("error rates must lie in [0,1]");
    return p;
}

bool EffectiveRates::weight_domain_ok() const {
    for (double q : {q_x, q_y, q_z, q_yz, q_zy, q_xy, q_xz})
        if (q >= 0.5) return false;
    return true;
}

EffectiveRates effective_rates(const ErrorModelParams& p) {
    EffectiveRates r;
    r.q_x = 4.0 / 3.0 * p.p_q + 2.0 / 3.0 * (p.p_t + p.p_f) + 8.0 / 15.0 * p.p_2q + 32.0 / 15.0 * p.p_2;
    r.q_y = r.q_z = 4.0 / 3.0 * p.p_q + 2.0 / 3.0 * p.p_f + 16.0 / 15.0 * (p.p_2q + p.p_2);
    r.q_yz = r.q_zy = 4.0 / 15.0 * p.p_2;
    r.q_xy = r.q_xz = 4.0 / 15.0 * p.p_2 + 8.0 / 15.0 * p.p_2q;
    return r;
}

Pauli depolarize1(double p, Rng& rng) {
    if (p < 0 || p > 1) throw std::invalid_argument("depolarizing rate outside [0,1]");
    if (!rng.bernoulli(p)) return Pauli::I;
    return static_cast<Pauli>(1 + rng.below(3));
}

std::pair<Pauli, Pauli> depolarize2(double p, Rng& rng) {
    if (p < 0 || p > 1) throw std::invalid_argument("depolarizing rate outside [0,1]");
    if (!rng.bernoulli(p)) return {Pauli::I, Pauli::I};
    uint64_t k = 1 + rng.below(15);
    return {static_cast<Pauli>(k >> 2), static_cast<Pauli>(k & 3)};
}

double supercheck_rate(int n_x, int n_y, int n_z, const EffectiveRates& r) {
    if (n_x < 0 || n_y < 0 || n_z < 0) throw std::invalid_argument("edge multiplicities must be nonnegative");
    return supercheck_rate_generic<double>(n_x, n_y, n_z, r.q_x, r.q_y, r.q_z);
}

double edge_weight(double q, double q_min) {
    if (q > 0.5) throw std::invalid_argument("flip rate above 1/2 has no positive weight");
    if (q < q_min) q = q_min;
    return std::log((1.0 - q) / q);
}

double fiber_loss(double lambda_db_per_km, double v_m_per_s, double tau_s, double l) {
    if (lambda_db_per_km < 0 || v_m_per_s <= 0 || tau_s <= 0 || l < 0)
        throw std::invalid_argument("fiber parameters must be positive");
    double spool_km = v_m_per_s * tau_s / 1000.0;
    return 1.0 - std::pow(10.0, -(lambda_db_per_km / 10.0) * spool_km * l * l);
}

double l_max(double lambda_db_per_km, double v_m_per_s, double tau_s, double p_perc) {
    if (p_perc <= 0 || p_perc >= 1) throw std::invalid_argument("percolation bound must lie in (0,1)");
    if (lambda_db_per_km <= 0 || v_m_per_s <= 0 || tau_s <= 0)
        throw std::invalid_argument("fiber parameters must be positive");
    double per_qubit_db = lambda_db_per_km * v_m_per_s * tau_s / 1000.0;
    return std::sqrt(std::abs(10.0 / per_qubit_db * std::log10(1.0 - p_perc)));
}

}  // namespace forge
