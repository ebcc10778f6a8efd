#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "forge/error_model.hpp"

namespace forge {

struct SweepSpec {
    std::vector<int> sizes;          // lattice sizes L
    std::vector<double> p_grid;      // uniform circuit error rates
    std::vector<double> loss_grid{0.0};
    long long samples = 10000;
    uint64_t master_seed = 0x5eedf0f5ULL;
    int workers = 0;  // 0 = hardware concurrency

    uint64_t config_hash() const;
    std::string to_json() const;
    static SweepSpec from_json(const std::string& text);
};

struct RatePoint {
    int l = 0;
    double p = 0, p_loss = 0;
    long long n = 0, fails = 0;
    double p_logic = 0, stderr_ = 0;
    // breakdown (reported in the metadata sidecar)
    long long fails_logical = 0, fails_percolation = 0;
    long long primal_fails = 0, dual_fails = 0;
    double loss_per_qubit_db = -1;  // set by break-even scans
};

// Logical failure rate (primal OR dual, percolation counted as failure) for
// one parameter point; bit-identical for a fixed seed regardless of worker
// count or scheduling. stop_after_fails > 0 ends the run early once that many
// failures accumulate (sequential trial order, so still deterministic); off
// by default to keep paper-style fixed ensembles.
RatePoint estimate_rate(int l, double p, double p_loss, long long samples, uint64_t point_seed,
                        int workers, long long stop_after_fails = 0);

using ProgressFn = std::function<void(const RatePoint&, size_t done, size_t total)>;
using KeepGoingFn = std::function<bool()>;

// Grid sweep with checkpointing: completed points append to
// `<out_csv>.partial`, and a matching partial file is resumed on restart.
// Passing an empty out_csv disables files. Returns rows ordered by
// (size, loss, p) grid order.
std::vector<RatePoint> run_sweep(const SweepSpec& spec, const std::string& out_csv = "",
                                 ProgressFn progress = nullptr, KeepGoingFn keep_going = nullptr);

// Fig-9-style scan: fixed p0, loss-per-qubit grid in dB/qubit; each size sees
// p_loss = 1 - 10^(-db L^2 / 10).
std::vector<RatePoint> breakeven_scan(double p0, const std::vector<double>& db_per_qubit,
                                      const std::vector<int>& sizes, long long samples,
                                      uint64_t master_seed, int workers,
                                      const std::string& out_csv = "", ProgressFn progress = nullptr);

// CSV: '#'-prefixed metadata, then an RFC-4180 header row.
std::string rate_table_csv(const std::vector<RatePoint>& rows, uint64_t config_hash, uint64_t seed,
                           bool breakeven_columns = false);
std::vector<RatePoint> parse_rate_table_csv(const std::string& text);

// JSON sidecar with seed, config hash, wall time, and failure breakdowns.
std::string rate_table_metadata(const SweepSpec& spec, const std::vector<RatePoint>& rows,
                                double wall_seconds);

void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace forge
