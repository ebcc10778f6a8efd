#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/rhg.hpp"
#include "forge/rng.hpp"

namespace forge {

enum class LatticeKind : uint8_t { SimpleCubic, CarveExtended, Square2d };

LatticeKind lattice_kind_from_name(const std::string& name);
const char* lattice_kind_name(LatticeKind k);

BondLattice build_bond_lattice(LatticeKind kind, int l);

// Fraction of samples whose open-bond subgraph wraps the torus in any
// direction.
double wrapping_probability(const BondLattice& lat, double p, long long samples, uint64_t seed,
                            int workers = 1);

// Wrapping indicator per threshold, all thresholds sharing one set of
// per-bond uniforms; monotone in p by construction.
std::vector<uint8_t> wrapping_coupled(const BondLattice& lat, const std::vector<double>& ps, Rng& rng);

struct WrappingCurve {
    int l = 0;
    std::vector<double> p, w;
};

struct PcEstimate {
    bool ok = false;
    std::string message;
    double p_c = 0, uncertainty = 0;
    std::vector<WrappingCurve> curves;
    std::vector<double> pairwise_crossings;
};

// Critical probability from size-pair crossings of the wrapping curves.
PcEstimate estimate_pc(LatticeKind kind, const std::vector<int>& sizes,
                       const std::vector<double>& p_grid, long long samples, uint64_t seed,
                       int workers = 1);

// Rough coordination-number estimate p_c ~ 1/(z-1).
double coordination_estimate(int z);

}  // namespace forge
