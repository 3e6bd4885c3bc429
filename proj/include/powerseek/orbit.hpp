#pragma once

#include "powerseek/mdp.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace powerseek {

/// Bijection on {0..d-1}.  Acting on a vector moves entry i to position
/// image[i].
class Permutation {
   public:
    explicit Permutation(std::vector<int> image);

    static Permutation identity(int size);
    static Permutation transposition(int size, int i, int j);

    int size() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_.at(i); }
    const std::vector<int>& image() const { return image_; }
    bool is_identity() const;
    Permutation inverse() const;

    template <typename Scalar>
    Vector<Scalar> apply(const Vector<Scalar>& v) const {
        if (v.size() != size()) throw InvalidArgument("Permutation::apply: length mismatch");
        Vector<Scalar> out(v.size());
        for (int i = 0; i < size(); ++i) out(image_[i]) = v(i);
        return out;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

   private:
    std::vector<int> image_;
};

enum class Preference { PrefersA1, PrefersA0, Tie };

std::string_view to_string(Preference p);

/// Two disjoint action sets at one state.
struct ActionSets {
    int state = 0;
    std::vector<int> a0;
    std::vector<int> a1;

    /// Throws InvalidArgument on out-of-range or shared actions.
    void validate(int action_count) const;
};

/// Uniform-over-greedy decision rule: f_s(A|theta) = |greedy ∩ A| / |greedy|,
/// so comparing the two probabilities compares the two intersection sizes.
template <typename Scalar>
Preference decide(const QTable<Scalar>& q, const ActionSets& sets);

template <typename Scalar>
struct OrbitReport {
    Vector<Scalar> base;
    std::vector<Vector<Scalar>> elements;  // lexicographic order when enumerated
    std::vector<Preference> labels;        // parallel to elements once labelled
    std::size_t a1_preferred = 0;
    std::size_t a0_preferred = 0;
    std::size_t ties = 0;
    std::size_t permutations_examined = 0;
    bool approximate = false;

    std::size_t size() const { return elements.size(); }
    bool labeled() const { return labels.size() == elements.size(); }
};

inline constexpr int kOrbitDimensionCap = 10;

template <typename Scalar>
using Membership = std::function<bool(const Vector<Scalar>&)>;

/// Membership in Theta and the preference label for one vector.
struct Evaluation {
    bool member = false;
    Preference label = Preference::Tie;
};

template <typename Scalar>
using Evaluator = std::function<Evaluation(const Vector<Scalar>&)>;

/// Every sigma·theta (sigma in S_d) passing `member`.  With `dedupe` the
/// orbit is a set of vectors, enumerated as distinct multiset permutations
/// in lexicographic order; without it each of the d! permutations
/// contributes one element.  Throws InvalidArgument when d exceeds the cap.
template <typename Scalar>
OrbitReport<Scalar> enumerate_orbit(const Vector<Scalar>& theta, const Membership<Scalar>& member,
                                    bool dedupe = true);

/// Approximate orbit from `draws` uniformly random permutations.
template <typename Scalar>
OrbitReport<Scalar> sample_orbit(const Vector<Scalar>& theta, const Membership<Scalar>& member, std::size_t draws,
                                 std::uint64_t seed);

/// Labels every element with the decision rule at sets.state.
template <typename Scalar>
OrbitReport<Scalar> preference_counts(OrbitReport<Scalar> orbit, const TabularMdp<Scalar>& mdp,
                                      const ActionSets& sets, const Scalar& gamma);

/// Enumerates and labels in one pass, calling `evaluate` once per distinct
/// vector.  `sampled_draws` > 0 switches to sample_orbit.
template <typename Scalar>
OrbitReport<Scalar> labeled_orbit(const Vector<Scalar>& theta, const Evaluator<Scalar>& evaluate,
                                  std::size_t sampled_draws = 0, std::uint64_t seed = 0);

template <typename Scalar>
struct Counterexample {
    int condition = 0;
    int phi = -1;
    int other_phi = -1;
    Vector<Scalar> theta;
    Vector<Scalar> other_theta;
    Vector<Scalar> image;
};

struct ConditionCheck {
    bool passed = true;
    std::size_t checks = 0;
};

template <typename Scalar>
struct RetargetabilityCertificate {
    std::vector<Permutation> phi;
    std::size_t n = 0;
    std::size_t a0_elements = 0;  // |Orbit_{A0 > A1}|
    std::array<ConditionCheck, 3> conditions{};
    std::optional<Counterexample<Scalar>> counterexample;  // first failure found

    bool certified() const { return conditions[0].passed && conditions[1].passed && conditions[2].passed; }
};

/// Exhaustive check of the three retargetability conditions over every
/// orbit element preferring A0: each phi flips it to A1, keeps it in Theta,
/// and distinct phis have disjoint images (all pairs, equal elements
/// included).
template <typename Scalar>
RetargetabilityCertificate<Scalar> certify_retargetable(const Vector<Scalar>& theta,
                                                        const std::vector<Permutation>& phi,
                                                        const TabularMdp<Scalar>& mdp, const ActionSets& sets,
                                                        const Scalar& gamma, const Membership<Scalar>& member);

/// Same check reusing a labelled orbit; `evaluate` covers vectors outside it.
template <typename Scalar>
RetargetabilityCertificate<Scalar> certify_retargetable(const OrbitReport<Scalar>& orbit,
                                                        const std::vector<Permutation>& phi,
                                                        const Evaluator<Scalar>& evaluate);

/// n_{A1>A0} >= n * n_{A0>A1}.
template <typename Scalar>
bool verify_majority(const OrbitReport<Scalar>& orbit, std::size_t n) {
    return orbit.a1_preferred >= n * orbit.a0_preferred;
}

}  // namespace powerseek
