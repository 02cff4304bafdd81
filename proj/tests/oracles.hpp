// Independent oracles for the model checker. These must not share code
#include <algorithm>
// with the implementation paths they validate: the enumeration oracle
// walks concrete paths of forward-layered chains, and the sampling oracle
// simulates runs.

#pragma once

#include <cstdint>
#include <functional>

#include "pctl/markov.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/prng.hpp"
#include "pctl/rational.hpp"

namespace oracles {

using pctl::MarkovChain;
using pctl::Rational;
using pctl::StateMask;

// Forward-layered chain: every edge goes to a strictly larger state,
// except self-loops on absorbing states. Until probabilities reduce to a
// finite path sum.
inline MarkovChain random_layered_chain(std::uint64_t seed, int states) {
    pctl::SplitMix64 rng(seed);
    MarkovChain mc;
    mc.ap = {"a", "b"};
    mc.labels.assign(states, {});
    mc.trans.resize(states);
    mc.init = 0;
    for (int s = 0; s < states; ++s) {
        if (rng.coin()) mc.labels[s].insert("a");
        if (rng.coin()) mc.labels[s].insert("b");
        if (s == states - 1) {
            mc.trans[s][s] = Rational(1);
            continue;
        }
        int available = states - s - 1;
        int degree = 1 + static_cast<int>(rng.below(std::min(2, available)));
        std::set<int> succs;
        while (static_cast<int>(succs.size()) < degree)
            succs.insert(s + 1 + static_cast<int>(rng.below(available)));
        Rational total(0);
        std::vector<Rational> weights;
        for (std::size_t i = 0; i < succs.size(); ++i) {
            Rational w(1 + static_cast<std::int64_t>(rng.below(3)));
            weights.push_back(w);
            total += w;
        }
        std::size_t i = 0;
        for (int t : succs) mc.trans[s][t] = weights[i++] / total;
    }
    return mc;
}

// Exact until probability by direct recursion over forward edges.
inline Rational enumerate_until(const MarkovChain& mc, int s, const StateMask& allowed,
                                const StateMask& target) {
    if (target[s]) return Rational(1);
    if (!allowed[s]) return Rational(0);
    // absorbing non-target state never reaches the target
    if (mc.trans[s].size() == 1 && mc.trans[s].count(s)) return Rational(0);
    Rational sum(0);
    for (const auto& [t, p] : mc.trans[s]) sum += p * enumerate_until(mc, t, allowed, target);
    return sum;
}

// Monte-Carlo estimate of the until probability from `from`, with the
// fraction of runs still undecided at the depth horizon reported so the
// caller can bound the truncation bias.
struct SampleEstimate {
    double satisfied = 0;
    double undecided = 0;
};

inline SampleEstimate sample_until(const MarkovChain& mc, int from, const StateMask& allowed,
                                   const StateMask& target, int runs, int horizon,
                                   std::uint64_t seed) {
    pctl::SplitMix64 rng(seed);
    int hits = 0, open = 0;
    for (int r = 0; r < runs; ++r) {
        int s = from;
        bool decided = false;
        for (int step = 0; step <= horizon; ++step) {
            if (target[s]) {
                ++hits;
                decided = true;
                break;
            }
            if (!allowed[s]) {
                decided = true;
                break;
            }
            // draw the successor by cumulative weight, exactly
            Rational draw(static_cast<std::int64_t>(rng.below(1u << 30)), 1u << 30);
            Rational acc(0);
            int chosen = mc.trans[s].rbegin()->first;
            for (const auto& [t, p] : mc.trans[s]) {
                acc += p;
                if (draw < acc) {
                    chosen = t;
                    break;
                }
            }
            s = chosen;
        }
        if (!decided) ++open;
    }
    SampleEstimate est;
    est.satisfied = static_cast<double>(hits) / runs;
    est.undecided = static_cast<double>(open) / runs;
    return est;
}

} // namespace oracles
