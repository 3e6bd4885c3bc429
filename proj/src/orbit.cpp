#include "powerseek/orbit.hpp"

#include "powerseek/random.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace powerseek {

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<bool> hit(image_.size(), false);
    for (int target : image_) {
        if (target < 0 || target >= static_cast<int>(image_.size()) || hit[target]) {
            throw InvalidArgument("Permutation: image is not a bijection");
        }
        hit[target] = true;
    }
}

Permutation Permutation::identity(int size) {
    std::vector<int> image(size);
    for (int i = 0; i < size; ++i) image[i] = i;
    return Permutation(std::move(image));
}

Permutation Permutation::transposition(int size, int i, int j) {
    Permutation p = identity(size);
    if (i < 0 || j < 0 || i >= size || j >= size) throw InvalidArgument("transposition: index out of range");
    std::swap(p.image_[i], p.image_[j]);
    return p;
}

bool Permutation::is_identity() const {
    for (int i = 0; i < size(); ++i) {
        if (image_[i] != i) return false;
    }
    return true;
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(image_.size());
    for (int i = 0; i < size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
}

std::string_view to_string(Preference p) {
    switch (p) {
        case Preference::PrefersA1:
            return "A1";
        case Preference::PrefersA0:
            return "A0";
        case Preference::Tie:
            return "tie";
    }
    return "tie";
}

void ActionSets::validate(int action_count) const {
    auto in_range = [&](int a) { return a >= 0 && a < action_count; };
    if (!std::all_of(a0.begin(), a0.end(), in_range) || !std::all_of(a1.begin(), a1.end(), in_range)) {
        throw InvalidArgument("action set refers to a missing action");
    }
    for (int a : a0) {
        if (std::find(a1.begin(), a1.end(), a) != a1.end()) {
            throw InvalidArgument("action sets A0 and A1 share action " + std::to_string(a));
        }
    }
}

template <typename Scalar>
Preference decide(const QTable<Scalar>& q, const ActionSets& sets) {
    const auto greedy = greedy_actions(q, sets.state);
    auto hits = [&](const std::vector<int>& set) {
        return std::count_if(greedy.begin(), greedy.end(),
                             [&](int a) { return std::find(set.begin(), set.end(), a) != set.end(); });
    };
    const auto in_a0 = hits(sets.a0);
    const auto in_a1 = hits(sets.a1);
    if (in_a1 > in_a0) return Preference::PrefersA1;
    if (in_a0 > in_a1) return Preference::PrefersA0;
    return Preference::Tie;
}

namespace {

template <typename Scalar>
void check_cap(const Vector<Scalar>& theta) {
    if (theta.size() > kOrbitDimensionCap) {
        throw InvalidArgument("orbit enumeration needs d <= " + std::to_string(kOrbitDimensionCap) + ", got d = " +
                              std::to_string(theta.size()) + "; use sampled permutations instead");
    }
}

template <typename Scalar>
void tally(OrbitReport<Scalar>& report) {
    report.a1_preferred = report.a0_preferred = report.ties = 0;
    for (auto label : report.labels) {
        if (label == Preference::PrefersA1) ++report.a1_preferred;
        else if (label == Preference::PrefersA0) ++report.a0_preferred;
        else ++report.ties;
    }
}

// Visits every arrangement of theta; distinct multiset permutations in
// lexicographic order when `dedupe`, otherwise all d! index permutations.
template <typename Scalar, typename Visit>
std::size_t for_each_arrangement(const Vector<Scalar>& theta, bool dedupe, Visit&& visit) {
    const int d = static_cast<int>(theta.size());
    std::size_t count = 0;
    if (dedupe) {
        std::vector<Scalar> values(theta.data(), theta.data() + d);
        std::sort(values.begin(), values.end());
        do {
            Vector<Scalar> v(d);
            for (int i = 0; i < d; ++i) v(i) = values[i];
            visit(v);
            ++count;
        } while (std::next_permutation(values.begin(), values.end()));
    } else {
        std::vector<int> order(d);
        for (int i = 0; i < d; ++i) order[i] = i;
        do {
            Vector<Scalar> v(d);
            for (int i = 0; i < d; ++i) v(i) = theta(order[i]);
            visit(v);
            ++count;
        } while (std::next_permutation(order.begin(), order.end()));
    }
    return count;
}

}  // namespace

template <typename Scalar>
OrbitReport<Scalar> enumerate_orbit(const Vector<Scalar>& theta, const Membership<Scalar>& member, bool dedupe) {
    check_cap(theta);
    OrbitReport<Scalar> report;
    report.base = theta;
    report.permutations_examined = for_each_arrangement(theta, dedupe, [&](const Vector<Scalar>& v) {
        if (member(v)) report.elements.push_back(v);
    });
    return report;
}

template <typename Scalar>
OrbitReport<Scalar> sample_orbit(const Vector<Scalar>& theta, const Membership<Scalar>& member, std::size_t draws,
                                 std::uint64_t seed) {
    const int d = static_cast<int>(theta.size());
    std::set<Vector<Scalar>, LexLess<Scalar>> seen;
    for (std::size_t k = 0; k < draws; ++k) {
        SplitMix64 rng(derive_seed(seed, k));
        std::vector<int> order(d);
        for (int i = 0; i < d; ++i) order[i] = i;
        for (int i = d - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        Vector<Scalar> v(d);
        for (int i = 0; i < d; ++i) v(i) = theta(order[i]);
        seen.insert(std::move(v));
    }
    OrbitReport<Scalar> report;
    report.base = theta;
    report.approximate = true;
    report.permutations_examined = draws;
    for (const auto& v : seen) {
        if (member(v)) report.elements.push_back(v);
    }
    return report;
}

template <typename Scalar>
OrbitReport<Scalar> preference_counts(OrbitReport<Scalar> orbit, const TabularMdp<Scalar>& mdp,
                                      const ActionSets& sets, const Scalar& gamma) {
    sets.validate(mdp.action_count(sets.state));
    orbit.labels.clear();
    for (const auto& v : orbit.elements) orbit.labels.push_back(decide(optimal_q(mdp, v, gamma), sets));
    tally(orbit);
    return orbit;
}

template <typename Scalar>
OrbitReport<Scalar> labeled_orbit(const Vector<Scalar>& theta, const Evaluator<Scalar>& evaluate,
                                  std::size_t sampled_draws, std::uint64_t seed) {
    OrbitReport<Scalar> report;
    std::vector<Preference> labels;
    auto member = [&](const Vector<Scalar>& v) {
        const Evaluation e = evaluate(v);
        if (e.member) labels.push_back(e.label);
        return e.member;
    };
    report = sampled_draws > 0 ? sample_orbit<Scalar>(theta, member, sampled_draws, seed)
                               : enumerate_orbit<Scalar>(theta, member, true);
    report.labels = std::move(labels);
    tally(report);
    return report;
}

template <typename Scalar>
RetargetabilityCertificate<Scalar> certify_retargetable(const OrbitReport<Scalar>& orbit,
                                                        const std::vector<Permutation>& phi,
                                                        const Evaluator<Scalar>& evaluate) {
    if (!orbit.labeled()) throw InvalidArgument("certify_retargetable: orbit is not labelled");
    const int d = static_cast<int>(orbit.base.size());
    for (const auto& p : phi) {
        if (p.size() != d) throw InvalidArgument("certify_retargetable: permutation length mismatch");
    }

    RetargetabilityCertificate<Scalar> cert;
    cert.phi = phi;
    cert.n = phi.size();

    std::map<Vector<Scalar>, Evaluation, LexLess<Scalar>> known;
    for (std::size_t i = 0; i < orbit.size(); ++i) known.emplace(orbit.elements[i], Evaluation{true, orbit.labels[i]});
    auto lookup = [&](const Vector<Scalar>& v) -> Evaluation {
        if (auto it = known.find(v); it != known.end()) return it->second;
        Evaluation e = evaluate(v);
        known.emplace(v, e);
        return e;
    };

    std::vector<const Vector<Scalar>*> preferring_a0;
    for (std::size_t i = 0; i < orbit.size(); ++i) {
        if (orbit.labels[i] == Preference::PrefersA0) preferring_a0.push_back(&orbit.elements[i]);
    }
    cert.a0_elements = preferring_a0.size();

    auto record = [&](int condition, int k, int l, const Vector<Scalar>& a, const Vector<Scalar>& b,
                      const Vector<Scalar>& image) {
        cert.conditions[condition - 1].passed = false;
        if (!cert.counterexample) cert.counterexample = Counterexample<Scalar>{condition, k, l, a, b, image};
    };

    // Conditions 1 and 2, with one image set per permutation for condition 3.
    std::vector<std::vector<Vector<Scalar>>> images(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        for (const auto* theta : preferring_a0) {
            Vector<Scalar> image = phi[k].apply(*theta);
            const Evaluation e = lookup(image);
            if (cert.conditions[0].passed) {
                ++cert.conditions[0].checks;
                if (e.label != Preference::PrefersA1) record(1, int(k), -1, *theta, *theta, image);
            }
            if (cert.conditions[1].passed) {
                ++cert.conditions[1].checks;
                if (!e.member) record(2, int(k), -1, *theta, *theta, image);
            }
            images[k].push_back(std::move(image));
        }
        std::sort(images[k].begin(), images[k].end(), LexLess<Scalar>{});
    }

    // Condition 3: phi' theta' != phi'' theta'' for all phi' != phi'' and all
    // theta', theta'' preferring A0 -- equivalently, the image sets of
    // distinct permutations are disjoint.
    const LexLess<Scalar> less;
    const std::size_t m = preferring_a0.size();
    for (std::size_t k = 0; k < phi.size() && cert.conditions[2].passed; ++k) {
        for (std::size_t l = k + 1; l < phi.size() && cert.conditions[2].passed; ++l) {
            cert.conditions[2].checks += m * m;
            auto a = images[k].begin();
            auto b = images[l].begin();
            while (a != images[k].end() && b != images[l].end()) {
                if (less(*a, *b)) {
                    ++a;
                } else if (less(*b, *a)) {
                    ++b;
                } else {
                    const Vector<Scalar> first = phi[k].inverse().apply(*a);
                    const Vector<Scalar> second = phi[l].inverse().apply(*b);
                    record(3, int(k), int(l), first, second, *a);
                    break;
                }
            }
        }
    }
    return cert;
}

template <typename Scalar>
RetargetabilityCertificate<Scalar> certify_retargetable(const Vector<Scalar>& theta,
                                                        const std::vector<Permutation>& phi,
                                                        const TabularMdp<Scalar>& mdp, const ActionSets& sets,
                                                        const Scalar& gamma, const Membership<Scalar>& member) {
    sets.validate(mdp.action_count(sets.state));
    Evaluator<Scalar> evaluate = [&](const Vector<Scalar>& v) {
        Evaluation e;
        e.member = member(v);
        e.label = decide(optimal_q(mdp, v, gamma), sets);
        return e;
    };
    const OrbitReport<Scalar> orbit = labeled_orbit<Scalar>(theta, evaluate);
    return certify_retargetable<Scalar>(orbit, phi, evaluate);
}

#define POWERSEEK_INSTANTIATE(S)                                                                                 \
    template Preference decide<S>(const QTable<S>&, const ActionSets&);                                         \
    template OrbitReport<S> enumerate_orbit<S>(const Vector<S>&, const Membership<S>&, bool);                    \
    template OrbitReport<S> sample_orbit<S>(const Vector<S>&, const Membership<S>&, std::size_t, std::uint64_t); \
    template OrbitReport<S> preference_counts<S>(OrbitReport<S>, const TabularMdp<S>&, const ActionSets&,        \
                                                 const S&);                                                      \
    template OrbitReport<S> labeled_orbit<S>(const Vector<S>&, const Evaluator<S>&, std::size_t, std::uint64_t); \
    template RetargetabilityCertificate<S> certify_retargetable<S>(const OrbitReport<S>&,                        \
                                                                   const std::vector<Permutation>&,              \
                                                                   const Evaluator<S>&);                         \
    template RetargetabilityCertificate<S> certify_retargetable<S>(                                              \
        const Vector<S>&, const std::vector<Permutation>&, const TabularMdp<S>&, const ActionSets&, const S&,    \
        const Membership<S>&);

POWERSEEK_INSTANTIATE(double)
POWERSEEK_INSTANTIATE(Rational)

#undef POWERSEEK_INSTANTIATE

}  // namespace powerseek
