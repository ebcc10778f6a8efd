#include "support/gate_level_mc.hpp"

#include <vector>

namespace forge::testing {

namespace {

// Pauli error frame over up to 32 labels; bit q of x/z marks an X/Z
// component on qubit q. Signs are irrelevant for flip counting.
struct Frame {
    uint32_t x = 0, z = 0;

    void inject(Pauli p, int q) {
        if (p == Pauli::X || p == Pauli::Y) x ^= 1u << q;
        if (p == Pauli::Z || p == Pauli::Y) z ^= 1u << q;
    }
    void h(int q) {
        uint32_t xb = (x >> q) & 1, zb = (z >> q) & 1;
        if (xb != zb) {
            x ^= 1u << q;
            z ^= 1u << q;
        }
    }
    void cnot(int c, int t) {
        if ((x >> c) & 1) x ^= 1u << t;
        if ((z >> t) & 1) z ^= 1u << c;
    }
    void cz(int a, int b) {
        if ((x >> a) & 1) z ^= 1u << b;
        if ((x >> b) & 1) z ^= 1u << a;
    }
};

// One fragment step. Channels are sites where a drawn Pauli may be injected;
// every other step is deterministic circuit structure.
struct Step {
    enum class What : uint8_t { H, Cnot, Cz, Chan1, Chan2, ReduceEmitter, EmitterReadout };
    What what;
    int a = -1, b = -1;
    double p = 0;
};

// The paper's rates are the lowest-order sums of per-process flip
// probabilities, so the estimator accumulates flip events per channel draw:
// each nontrivial draw is propagated alone through the rest of the fragment.
class FragmentSampler {
  public:
    std::vector<Step> steps;
    int emitter = 0;

    // Returns the summed flip intensity for `target` (XORed with the
    // emitter-readout byproduct when the fragment measures the emitter).
    double flip_intensity(int target, long long samples, Rng& rng) const {
        long long events = 0;
        for (long long s = 0; s < samples; ++s) events += sample_events(&target, 1, rng, false);
        return static_cast<double>(events) / static_cast<double>(samples);
    }

    // Joint flips of two targets caused by a single channel draw.
    double joint_intensity(int t1, int t2, long long samples, Rng& rng) const {
        int targets[2] = {t1, t2};
        long long events = 0;
        for (long long s = 0; s < samples; ++s) events += sample_events(targets, 2, rng, true);
        return static_cast<double>(events) / static_cast<double>(samples);
    }

  private:
    long long sample_events(const int* targets, int n_targets, Rng& rng, bool joint) const {
        long long events = 0;
        for (size_t site = 0; site < steps.size(); ++site) {
            const Step& st = steps[site];
            Pauli pa = Pauli::I, pb = Pauli::I;
            if (st.what == Step::What::Chan1) {
                pa = depolarize1(st.p, rng);
                if (pa == Pauli::I) continue;
            } else if (st.what == Step::What::Chan2) {
                auto pair = depolarize2(st.p, rng);
                pa = pair.first;
                pb = pair.second;
                if (pa == Pauli::I && pb == Pauli::I) continue;
            } else {
                continue;
            }
            Frame f;
            f.inject(pa, st.a);
            if (st.what == Step::What::Chan2) f.inject(pb, st.b);
            bool readout_flip = false;
            for (size_t k = site + 1; k < steps.size(); ++k) {
                const Step& g = steps[k];
                switch (g.what) {
                    case Step::What::H: f.h(g.a); break;
                    case Step::What::Cnot: f.cnot(g.a, g.b); break;
                    case Step::What::Cz: f.cz(g.a, g.b); break;
                    case Step::What::ReduceEmitter:
                        if ((f.x >> emitter) & 1) {
                            f.x ^= 1u << emitter;
                            if (g.a >= 0) f.z ^= 1u << g.a;
                        }
                        break;
                    case Step::What::EmitterReadout:
                        readout_flip = (f.x >> emitter) & 1;
                        // The misapplied byproduct is a Z on the photon.
                        if (readout_flip && g.a >= 0) f.z ^= 1u << g.a;
                        f.x &= ~(1u << emitter);
                        f.z &= ~(1u << emitter);
                        break;
                    default: break;  // other channels: independent sources
                }
            }
            if (joint) {
                bool all = true;
                for (int t = 0; t < n_targets; ++t) all = all && ((f.z >> targets[t]) & 1);
                if (all) ++events;
            } else {
                if ((f.z >> targets[0]) & 1) ++events;
            }
        }
        return events;
    }
};

}  // namespace

double estimate_qx(const ErrorModelParams& p, long long samples, uint64_t seed) {
    Rng rng(splitmix64(seed));
    // labels: 0 = emitter, 1 = photon, 2..5 = scattering partners
    FragmentSampler fs;
    fs.emitter = 0;
    auto& s = fs.steps;
    s.push_back({Step::What::H, 0, -1, 0});
    s.push_back({Step::What::Chan1, 0, -1, p.p_q});
    s.push_back({Step::What::ReduceEmitter, -1, -1, 0});  // |+> eats X_q
    s.push_back({Step::What::Cnot, 0, 1, 0});
    s.push_back({Step::What::Chan2, 0, 1, p.p_2q});
    s.push_back({Step::What::H, 0, -1, 0});
    s.push_back({Step::What::Chan1, 0, -1, p.p_q});
    s.push_back({Step::What::Chan1, 0, -1, p.p_t});
    s.push_back({Step::What::EmitterReadout, 1, -1, 0});  // byproduct Z on the photon
    for (int partner = 2; partner <= 5; ++partner) {
        s.push_back({Step::What::Cz, 1, partner, 0});
        s.push_back({Step::What::Chan2, 1, partner, p.p_2});
    }
    s.push_back({Step::What::Chan1, 1, -1, p.p_f});
    return fs.flip_intensity(1, samples, rng);
}

double estimate_qy(const ErrorModelParams& p, long long samples, uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0x9d2c5680ULL));
    // labels: 0 = emitter, 1..5 = chain photons, 6..7 = scattering partners
    const int k_chain = 5, mid = 3;
    FragmentSampler fs;
    fs.emitter = 0;
    auto& s = fs.steps;
    s.push_back({Step::What::H, 0, -1, 0});
    s.push_back({Step::What::Chan1, 0, -1, p.p_q});
    s.push_back({Step::What::ReduceEmitter, -1, -1, 0});
    for (int k = 1; k <= k_chain; ++k) {
        s.push_back({Step::What::Cnot, 0, k, 0});
        s.push_back({Step::What::Chan2, 0, k, p.p_2q});
        s.push_back({Step::What::H, 0, -1, 0});
        s.push_back({Step::What::Chan1, 0, -1, p.p_q});
        s.push_back({Step::What::ReduceEmitter, k, -1, 0});
    }
    for (int partner = 6; partner <= 7; ++partner) {
        s.push_back({Step::What::Cz, mid, partner, 0});
        s.push_back({Step::What::Chan2, mid, partner, p.p_2});
    }
    s.push_back({Step::What::Chan1, mid, -1, p.p_f});
    return fs.flip_intensity(mid, samples, rng);
}

double estimate_q_pair_xy(const ErrorModelParams& p, long long samples, uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0xb5297a4dULL));
    // labels: 0 = emitter, 1 = shared chain qubit, 2/3 = the pair members
    FragmentSampler fs;
    fs.emitter = 0;
    auto& s = fs.steps;
    s.push_back({Step::What::Cnot, 0, 1, 0});
    s.push_back({Step::What::Chan2, 0, 1, p.p_2q});
    s.push_back({Step::What::Cz, 1, 2, 0});
    s.push_back({Step::What::Chan2, 1, 2, p.p_2});
    s.push_back({Step::What::Cz, 1, 3, 0});
    s.push_back({Step::What::Chan2, 1, 3, p.p_2});
    return fs.joint_intensity(2, 3, samples, rng);
}

double estimate_q_pair_yz(const ErrorModelParams& p, long long samples, uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0x68e31da4ULL));
    // labels: 1 = shared |+>-stream qubit, 2/3 = the pair members
    FragmentSampler fs;
    fs.emitter = 0;
    auto& s = fs.steps;
    s.push_back({Step::What::Cz, 1, 2, 0});
    s.push_back({Step::What::Chan2, 1, 2, p.p_2});
    s.push_back({Step::What::Cz, 1, 3, 0});
    s.push_back({Step::What::Chan2, 1, 3, p.p_2});
    return fs.joint_intensity(2, 3, samples, rng);
}

}  // namespace forge::testing
