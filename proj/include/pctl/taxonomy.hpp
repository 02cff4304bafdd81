// Safety/liveness taxonomy of PCTL formulas: the closure rewriting for
// flat formulas, the safe/live decomposition, and membership checks for
// the five fragments (safe, strongly safe, the sound and the complete
// live fragment, absolutely live).
//
// The safe and strongly-safe fragments are purely syntactic. The live
// and absolutely-live fragments carry semantic side conditions that
// reduce to PCTL satisfiability, which is open in general; those checks
// are three-valued and discharge what they can with a bounded model
// search plus a deliberately tiny set of entailment rules.

#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pctl/errors.hpp"
#include "pctl/formula.hpp"
#include "pctl/markov.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/normal_form.hpp"
#include "pctl/parser.hpp"

namespace pctl {

// Closure requests that are provably not expressible (strict bounds) or
// not compositional (conjunctions of non-literals).
class ClosureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Closure of a single flat conjunct
// ---------------------------------------------------------------------------

// Rewrites a flat conjunction-free formula into its closure:
//   literals and X/upper-until/lower-weak-until operators are fixed
//   points, a lower-bounded until weakens to weak until, an upper-bounded
//   weak until tightens to until, and the map distributes over |.
// Conjunctions of non-literals are rejected (the closure of a
// conjunction is not the conjunction of the closures) and so are strict
// bounds (their closure leaves PCTL).
inline StateFormula cls_flat(const StateFormula& phi) {
    if (is_literal(phi)) return phi;
    switch (phi.kind()) {
        case StateFormula::Kind::Or:
            return f_or(cls_flat(phi.lhs()), cls_flat(phi.rhs()));
        case StateFormula::Kind::And:
            throw ClosureError(
                "closure does not distribute over conjunctions of non-literal formulas");
        case StateFormula::Kind::Prob: {
            if (is_strict(phi.cmp()))
                throw ClosureError("the closure of a strict probability bound is not expressible");
            const PathFormula& p = phi.path();
            if (p.kind() == PathFormula::Kind::Next) {
                if (!is_literal(p.arg())) break;
                return phi;
            }
            if (!is_literal(p.lhs()) || !is_literal(p.rhs())) break;
            if (p.kind() == PathFormula::Kind::Until) {
                if (phi.cmp() == Comparison::Le) return phi;
                return prob(Comparison::Ge, phi.bound(), weak_until(p.lhs(), p.rhs()));
            }
            // weak until
            if (phi.cmp() == Comparison::Ge) return phi;
            return prob(Comparison::Le, phi.bound(), until(p.lhs(), p.rhs()));
        }
        default:
            break;
    }
    throw ClosureError("closure is defined on flat conjunction-free formulas only");
}

// ---------------------------------------------------------------------------
// Decomposition into a safe and a live part
// ---------------------------------------------------------------------------

struct ConjunctTrace {
    StateFormula conjunct;
    StateFormula safe_part;
    StateFormula live_part;
};

struct DecompositionResult {
    StateFormula safe_part;
    StateFormula live_part;
    std::vector<ConjunctTrace> trace;
};

bool in_safe(const StateFormula& phi);

// Splits a flat formula into an equivalent conjunction of a safety and a
// liveness formula: per outer conjunct c, the safe side is its closure s
// and the live side is c | !s.
inline DecompositionResult decompose_flat(const StateFormula& phi,
                                          std::size_t cnf_budget = kDefaultCnfNodeBudget) {
    StateFormula pnf = to_pnf(phi);
    if (!is_flat(pnf)) throw std::invalid_argument("decompose_flat: input is not flat");
    std::vector<StateFormula> conjuncts = flat_outer_cnf(pnf, cnf_budget);
    DecompositionResult result;
    for (const StateFormula& conjunct : conjuncts) {
        ConjunctTrace trace;
        trace.conjunct = conjunct;
        trace.safe_part = cls_flat(conjunct);
        trace.live_part = f_or(conjunct, negate(trace.safe_part));
        result.trace.push_back(trace);
    }
    result.safe_part = result.trace.front().safe_part;
    result.live_part = result.trace.front().live_part;
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        result.safe_part = f_and(result.safe_part, result.trace[i].safe_part);
        result.live_part = f_and(result.live_part, result.trace[i].live_part);
    }
    if (!in_safe(result.safe_part))
        throw std::logic_error("decompose_flat: closure left the safe fragment");
    return result;
}

// ---------------------------------------------------------------------------
// Safe fragment (syntactic)
// ---------------------------------------------------------------------------

// Membership in the safe fragment: literals; lower-bounded X and W over
// members; & and |; upper-bounded U whose negated arguments are members.
// An upper-bounded X is admitted through its lower-bound complement so
// that every closure output stays inside the fragment.
inline bool in_safe(const StateFormula& phi) {
    StateFormula f = to_pnf(phi);
    if (is_literal(f)) return true;
    switch (f.kind()) {
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            return in_safe(f.lhs()) && in_safe(f.rhs());
        case StateFormula::Kind::Prob: {
            const PathFormula& p = f.path();
            switch (p.kind()) {
                case PathFormula::Kind::Next:
                    if (f.cmp() == Comparison::Ge) return in_safe(p.arg());
                    if (f.cmp() == Comparison::Le) return in_safe(negate(p.arg()));
                    return false;
                case PathFormula::Kind::WeakUntil:
                    return f.cmp() == Comparison::Ge && in_safe(p.lhs()) && in_safe(p.rhs());
                case PathFormula::Kind::Until:
                    return f.cmp() == Comparison::Le && in_safe(negate(p.lhs())) &&
                           in_safe(negate(p.rhs()));
            }
            return false;
        }
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------
// Strong safety fragment (syntactic)
// ---------------------------------------------------------------------------

bool in_ssafe(const StateFormula& phi);

namespace detail {

// The box-guarded set: conjunctions/disjunctions of almost-sure globally
// formulas over strongly safe arguments. The false constant qualifies as
// the almost-sure globally of false.
inline bool in_fbox(const StateFormula& phi) {
    if (phi.is_false()) return true;
    switch (phi.kind()) {
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            return in_fbox(phi.lhs()) && in_fbox(phi.rhs());
        case StateFormula::Kind::Prob: {
            const PathFormula& p = phi.path();
            return phi.cmp() == Comparison::Ge && phi.bound() == Rational(1) &&
                   p.kind() == PathFormula::Kind::WeakUntil && p.rhs().is_false() &&
                   in_ssafe(p.lhs());
        }
        default:
            return false;
    }
}

} // namespace detail

// Strong safety: literals, & and |, and lower-bounded W whose right side
// is box-guarded. Stuttering a state or deleting a single tree occurrence
// cannot break such formulas.
inline bool in_ssafe(const StateFormula& phi) {
    StateFormula f = to_pnf(phi);
    if (is_literal(f)) return true;
    switch (f.kind()) {
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            return in_ssafe(f.lhs()) && in_ssafe(f.rhs());
        case StateFormula::Kind::Prob: {
            const PathFormula& p = f.path();
            return f.cmp() == Comparison::Ge && p.kind() == PathFormula::Kind::WeakUntil &&
                   in_ssafe(p.lhs()) && detail::in_fbox(p.rhs());
        }
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------
// Three-valued verdicts and the bounded model search
// ---------------------------------------------------------------------------

enum class Verdict { In, NotIn, Unknown };

struct SearchStats {
    std::size_t chains_checked = 0;
    int max_states = 0;
};

struct FragmentVerdict {
    Verdict verdict = Verdict::NotIn;
    std::string reason;
    SearchStats stats;

    bool in() const { return verdict == Verdict::In; }
    bool operator==(Verdict v) const { return verdict == v; }

    static FragmentVerdict yes() { return {Verdict::In, "", {}}; }
    static FragmentVerdict no() { return {Verdict::NotIn, "", {}}; }
    static FragmentVerdict unknown(std::string reason, SearchStats stats) {
        return {Verdict::Unknown, std::move(reason), stats};
    }
};

inline std::string verdict_word(Verdict v) {
    switch (v) {
        case Verdict::In: return "in";
        case Verdict::NotIn: return "not-in";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

struct BoundedSearchParams {
    // deterministic first: every chain with up to this many states over
    // the grid
    int exhaustive_states = 2;
    std::vector<Rational> grid = {Rational(1), Rational(1, 2)};
    // probabilistic second: seeded random chains
    int random_samples = 200;
    int random_max_states = 6;
    std::uint64_t seed = 1;
};

namespace detail {

// Searches for a finite chain satisfying the formula: exhaustive over
// tiny chains, then seeded random sampling. A miss is not a proof of
// unsatisfiability.
inline std::optional<MarkovChain> bounded_find_model(const StateFormula& phi,
                                                     const BoundedSearchParams& params,
                                                     SearchStats& stats) {
    auto atom_set = phi.atoms();
    std::vector<std::string> alphabet(atom_set.begin(), atom_set.end());
    if (alphabet.empty()) alphabet.push_back("a");
    std::size_t label_choices = std::size_t{1} << alphabet.size();
    stats = {};
    for (int k = 1; k <= params.exhaustive_states; ++k) {
        std::vector<std::map<int, Rational>> rows;
        std::map<int, Rational> current;
        enumerate_rows(params.grid, k, 0, Rational(1), current, rows);
        if (rows.empty()) continue;
        std::size_t per_state = label_choices * rows.size();
        std::vector<std::size_t> odometer(k, 0);
        while (true) {
            MarkovChain mc;
            mc.ap = alphabet;
            mc.labels.assign(k, {});
            mc.trans.assign(k, {});
            mc.init = 0;
            for (int s = 0; s < k; ++s) {
                std::size_t label_idx = odometer[s] / rows.size();
                for (std::size_t bit = 0; bit < alphabet.size(); ++bit)
                    if ((label_idx >> bit) & 1u) mc.labels[s].insert(alphabet[bit]);
                mc.trans[s] = rows[odometer[s] % rows.size()];
            }
            ++stats.chains_checked;
            stats.max_states = std::max(stats.max_states, k);
            if (check(mc, phi)) return mc;
            int pos = k - 1;
            while (pos >= 0) {
                if (++odometer[pos] < per_state) break;
                odometer[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    for (int i = 0; i < params.random_samples; ++i) {
        GenParams gen;
        gen.seed = params.seed + static_cast<std::uint64_t>(i);
        gen.state_count = 1 + static_cast<int>(gen.seed % params.random_max_states);
        gen.ap = alphabet;
        MarkovChain mc = random_mc(gen);
        ++stats.chains_checked;
        stats.max_states = std::max(stats.max_states, mc.state_count());
        if (check(mc, phi)) return mc;
    }
    return std::nullopt;
}

inline FragmentVerdict three_valued_and(const FragmentVerdict& a, const FragmentVerdict& b) {
    if (a.verdict == Verdict::NotIn) return a;
    if (b.verdict == Verdict::NotIn) return b;
    if (a.verdict == Verdict::Unknown) return a;
    if (b.verdict == Verdict::Unknown) return b;
    return FragmentVerdict::yes();
}

inline FragmentVerdict three_valued_or(const FragmentVerdict& a, const FragmentVerdict& b) {
    if (a.verdict == Verdict::In) return a;
    if (b.verdict == Verdict::In) return b;
    if (a.verdict == Verdict::Unknown) return a;
    if (b.verdict == Verdict::Unknown) return b;
    return FragmentVerdict::no();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Sound live fragment
// ---------------------------------------------------------------------------

// Membership in the sound live fragment. Lower bounds only (strict ones
// included); an eventually over a literal additionally requires the
// literal to be satisfiable, since an unsatisfiable one collapses the
// formula to false. Always decides.
inline FragmentVerdict in_live_lt(const StateFormula& phi) {
    StateFormula f = to_pnf(phi);
    if (f.is_true()) return FragmentVerdict::yes();
    switch (f.kind()) {
        case StateFormula::Kind::And:
            return detail::three_valued_and(in_live_lt(f.lhs()), in_live_lt(f.rhs()));
        case StateFormula::Kind::Or:
            // one live disjunct suffices, so decompose before dismissing
            // the whole as a literal
            return detail::three_valued_or(in_live_lt(f.lhs()), in_live_lt(f.rhs()));
        case StateFormula::Kind::Prob: {
            if (!is_lower_bound(f.cmp())) return FragmentVerdict::no();
            const PathFormula& p = f.path();
            switch (p.kind()) {
                case PathFormula::Kind::Next:
                    return in_live_lt(p.arg());
                case PathFormula::Kind::Until:
                    if (p.lhs().is_true() && is_literal(p.rhs()))
                        return literal_sat(p.rhs()) ? FragmentVerdict::yes()
                                                    : FragmentVerdict::no();
                    return in_live_lt(p.rhs());
                case PathFormula::Kind::WeakUntil:
                    return detail::three_valued_or(in_live_lt(p.lhs()), in_live_lt(p.rhs()));
            }
            return FragmentVerdict::no();
        }
        default:
            return FragmentVerdict::no();
    }
}

// ---------------------------------------------------------------------------
// Complete live fragment
// ---------------------------------------------------------------------------

enum class LiveGtMode {
    // until admits a live left side unconditionally: complete but unsound
    Syntactic,
    // the left-side-only case additionally needs lhs & formula to be
    // satisfiable; discharged by bounded search, Unknown when exhausted
    Guarded,
};

inline FragmentVerdict in_live_gt(const StateFormula& phi, LiveGtMode mode,
                                  const BoundedSearchParams& params = {}) {
    StateFormula f = to_pnf(phi);
    if (f.is_true()) return FragmentVerdict::yes();
    switch (f.kind()) {
        case StateFormula::Kind::And:
            return detail::three_valued_and(in_live_gt(f.lhs(), mode, params),
                                            in_live_gt(f.rhs(), mode, params));
        case StateFormula::Kind::Or:
            return detail::three_valued_or(in_live_gt(f.lhs(), mode, params),
                                           in_live_gt(f.rhs(), mode, params));
        case StateFormula::Kind::Prob: {
            if (!is_lower_bound(f.cmp())) return FragmentVerdict::no();
            const PathFormula& p = f.path();
            switch (p.kind()) {
                case PathFormula::Kind::Next:
                    return in_live_gt(p.arg(), mode, params);
                case PathFormula::Kind::WeakUntil:
                    return detail::three_valued_or(in_live_gt(p.lhs(), mode, params),
                                                   in_live_gt(p.rhs(), mode, params));
                case PathFormula::Kind::Until: {
                    if (p.lhs().is_true() && is_literal(p.rhs()) && literal_sat(p.rhs()))
                        return FragmentVerdict::yes();
                    FragmentVerdict rhs = in_live_gt(p.rhs(), mode, params);
                    if (rhs.verdict == Verdict::In) return rhs;
                    FragmentVerdict lhs = in_live_gt(p.lhs(), mode, params);
                    if (mode == LiveGtMode::Syntactic)
                        return detail::three_valued_or(lhs, rhs);
                    if (lhs.verdict == Verdict::In) {
                        SearchStats stats;
                        auto model = detail::bounded_find_model(f_and(p.lhs(), f), params, stats);
                        if (model) return FragmentVerdict::yes();
                        return FragmentVerdict::unknown(
                            "satisfiability of the until source conjoined with the formula "
                            "could not be established by bounded search",
                            stats);
                    }
                    return detail::three_valued_or(lhs, rhs);
                }
            }
            return FragmentVerdict::no();
        }
        default:
            return FragmentVerdict::no();
    }
}

// ---------------------------------------------------------------------------
// Absolute liveness fragment
// ---------------------------------------------------------------------------

namespace detail {

// flattens an and-tree and tests whether some conjunct equals the needle
inline bool conjunction_contains(const StateFormula& haystack, const StateFormula& needle) {
    if (haystack == needle) return true;
    if (haystack.kind() == StateFormula::Kind::And)
        return conjunction_contains(haystack.lhs(), needle) ||
               conjunction_contains(haystack.rhs(), needle);
    return false;
}

// Tiny sound entailment check for rhs => lhs, used to prove
// !lhs & rhs == false without a satisfiability decision:
//   lhs is true; rhs is a conjunction containing lhs; rhs is false; or
//   lhs demands positive reachability of a goal that rhs's until already
//   reaches with positive probability.
inline bool entails(const StateFormula& rhs, const StateFormula& lhs) {
    if (lhs.is_true()) return true;
    if (rhs.is_false()) return true;
    if (conjunction_contains(rhs, lhs)) return true;
    if (lhs.kind() == StateFormula::Kind::Prob && rhs.kind() == StateFormula::Kind::Prob) {
        const PathFormula& lp = lhs.path();
        const PathFormula& rp = rhs.path();
        bool lhs_pos_reach = lhs.cmp() == Comparison::Gt && lhs.bound() == Rational(0) &&
                             lp.kind() == PathFormula::Kind::Until && lp.lhs().is_true();
        bool rhs_pos_until =
            rp.kind() == PathFormula::Kind::Until &&
            ((rhs.cmp() == Comparison::Gt) ||
             (rhs.cmp() == Comparison::Ge && rhs.bound() > Rational(0)));
        if (lhs_pos_reach && rhs_pos_until && conjunction_contains(rp.rhs(), lp.rhs()))
            return true;
    }
    return false;
}

// a syntactically visible collapse to false: the constant or an
// unsatisfiable literal
inline bool obviously_false(const StateFormula& phi) {
    if (phi.is_false()) return true;
    return is_literal(phi) && !literal_sat(phi);
}

} // namespace detail

// Membership in the absolute liveness fragment: positive-probability
// operators whose reached side is itself absolutely live, or whose source
// side is absolutely live and implied by the reached side. The
// implication is discharged by entailment rules or refuted by bounded
// search; otherwise the verdict is Unknown.
inline FragmentVerdict in_alive(const StateFormula& phi, const BoundedSearchParams& params = {}) {
    StateFormula f = to_pnf(phi);
    if (f.is_true()) return FragmentVerdict::yes();
    switch (f.kind()) {
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            // both sides must belong for either connective
            return detail::three_valued_and(in_alive(f.lhs(), params), in_alive(f.rhs(), params));
        case StateFormula::Kind::Prob: {
            if (!(f.cmp() == Comparison::Gt && f.bound() == Rational(0)))
                return FragmentVerdict::no();
            const PathFormula& p = f.path();
            if (p.kind() == PathFormula::Kind::Next) return in_alive(p.arg(), params);
            bool is_until = p.kind() == PathFormula::Kind::Until;
            FragmentVerdict rhs = in_alive(p.rhs(), params);
            if (rhs.verdict == Verdict::In) return rhs;
            FragmentVerdict lhs = in_alive(p.lhs(), params);
            if (lhs.verdict == Verdict::In) {
                // a reach goal that is plainly false empties an until
                if (is_until && detail::obviously_false(p.rhs()))
                    return rhs.verdict == Verdict::Unknown
                               ? FragmentVerdict::unknown("reached side undecided", rhs.stats)
                               : FragmentVerdict::no();
                if (detail::entails(p.rhs(), p.lhs())) return FragmentVerdict::yes();
                SearchStats stats;
                auto refutation =
                    detail::bounded_find_model(f_and(negate(p.lhs()), p.rhs()), params, stats);
                if (refutation) {
                    // the implication fails, so this clause cannot fire
                    return rhs.verdict == Verdict::Unknown
                               ? FragmentVerdict::unknown("reached side undecided", rhs.stats)
                               : FragmentVerdict::no();
                }
                return FragmentVerdict::unknown(
                    "could not decide whether the reached side entails the source side",
                    stats);
            }
            if (lhs.verdict == Verdict::Unknown || rhs.verdict == Verdict::Unknown)
                return FragmentVerdict::unknown("argument membership undecided", lhs.stats);
            return FragmentVerdict::no();
        }
        default:
            return FragmentVerdict::no();
    }
}

// ---------------------------------------------------------------------------
// Aggregate classification
// ---------------------------------------------------------------------------

struct ClassificationReport {
    StateFormula input;
    StateFormula pnf;
    bool flat = false;
    bool safe = false;
    bool ssafe = false;
    FragmentVerdict live_lt;
    FragmentVerdict live_gt_syntactic;
    FragmentVerdict live_gt_guarded;
    FragmentVerdict alive;
    std::vector<std::string> notes;
};

inline ClassificationReport classify(const StateFormula& phi,
                                     const BoundedSearchParams& params = {}) {
    ClassificationReport report;
    report.input = phi;
    report.pnf = to_pnf(phi);
    report.flat = is_flat(report.pnf);
    report.safe = in_safe(report.pnf);
    report.ssafe = in_ssafe(report.pnf);
    report.live_lt = in_live_lt(report.pnf);
    report.live_gt_syntactic = in_live_gt(report.pnf, LiveGtMode::Syntactic, params);
    report.live_gt_guarded = in_live_gt(report.pnf, LiveGtMode::Guarded, params);
    report.alive = in_alive(report.pnf, params);
    if (report.ssafe && !report.safe)
        throw std::logic_error("classification inconsistency: strongly safe outside safe");
    if (report.ssafe) report.notes.push_back("strongly safe formulas are safe");
    if (report.alive.in()) report.notes.push_back("absolutely live formulas are live");
    if (!report.flat)
        report.notes.push_back(
            "not flat: nested probabilities or strict bounds exclude the closure analysis");
    if (report.safe && report.live_lt.in())
        report.notes.push_back("both safe and live: the formula is trivially true");
    return report;
}

inline std::string verdict_text(const FragmentVerdict& v) {
    if (v.verdict != Verdict::Unknown) return verdict_word(v.verdict);
    std::ostringstream out;
    out << "unknown (" << v.reason << "; searched " << v.stats.chains_checked
        << " chains up to " << v.stats.max_states << " states)";
    return out.str();
}

inline std::string report_to_text(const ClassificationReport& r) {
    std::ostringstream out;
    out << "input: " << print_formula(r.input) << "\n";
    out << "pnf: " << print_formula(r.pnf) << "\n";
    out << "flat: " << (r.flat ? "yes" : "no") << "\n";
    out << "safe: " << (r.safe ? "in" : "not-in") << "\n";
    out << "ssafe: " << (r.ssafe ? "in" : "not-in") << "\n";
    out << "live_lt: " << verdict_text(r.live_lt) << "\n";
    out << "live_gt_syntactic: " << verdict_text(r.live_gt_syntactic) << "\n";
    out << "live_gt_guarded: " << verdict_text(r.live_gt_guarded) << "\n";
    out << "alive: " << verdict_text(r.alive) << "\n";
    for (const auto& note : r.notes) out << "note: " << note << "\n";
    return out.str();
}

inline nlohmann::json verdict_to_json(const FragmentVerdict& v) {
    nlohmann::json j;
    j["verdict"] = verdict_word(v.verdict);
    if (v.verdict == Verdict::Unknown) {
        j["reason"] = v.reason;
        j["chains_checked"] = v.stats.chains_checked;
        j["max_states"] = v.stats.max_states;
    }
    return j;
}

inline nlohmann::json report_to_json(const ClassificationReport& r) {
    nlohmann::json j;
    j["input"] = print_formula(r.input);
    j["pnf"] = print_formula(r.pnf);
    j["flat"] = r.flat;
    j["verdicts"]["safe"] = r.safe ? "in" : "not-in";
    j["verdicts"]["ssafe"] = r.ssafe ? "in" : "not-in";
    j["verdicts"]["live_lt"] = verdict_to_json(r.live_lt);
    j["verdicts"]["live_gt_syntactic"] = verdict_to_json(r.live_gt_syntactic);
    j["verdicts"]["live_gt_guarded"] = verdict_to_json(r.live_gt_guarded);
    j["verdicts"]["alive"] = verdict_to_json(r.alive);
    j["notes"] = r.notes;
    return j;
}

} // namespace pctl
