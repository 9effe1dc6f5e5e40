#include "oracles.hpp"

#include "solsel/errors.hpp"
#include "solsel/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace solsel;

namespace {

std::set<oracle::Index> as_set(const IndexSet& s) {
    std::set<oracle::Index> out;
    for (const auto& m : s) out.insert(m.e);
    return out;
}

bool contains(const IndexSet& s, const MultiIndex& m) { return std::binary_search(s.begin(), s.end(), m); }

} // namespace

TEST_CASE("multi-index arithmetic and order") {
    MultiIndex m{-1, 2};
    CHECK(m.degree() == 1);
    CHECK(m.norm() == 3);
    CHECK(m.abs() == MultiIndex{1, 2});
    CHECK(m.str() == "(-1,2)");
    CHECK(MultiIndex::unit(3, 1) == MultiIndex{0, 1, 0});
    CHECK(MultiIndex::unit(3, 1).unit_slot() == 1);
    CHECK(m.unit_slot() == -1);
    CHECK(precedes(MultiIndex{1, 2}, MultiIndex{2, 3}));
    CHECK(strictly_precedes(MultiIndex{1, 2}, MultiIndex{2, 3}));
    CHECK(precedes(m, m));
    CHECK_FALSE(strictly_precedes(m, m));
    CHECK_FALSE(precedes(MultiIndex{1, 2}, MultiIndex{2, 1}));
    CHECK(m + MultiIndex{1, 0} == MultiIndex{0, 2});
    CHECK(m.dot({-1.3, -0.25}) == doctest::Approx(0.8));

    // degree stays exact at the advertised size
    MultiIndex big(std::vector<int>(8, 8));
    CHECK(big.degree() == 64);
}

TEST_CASE("enumerate_r_nr on the two-mode example") {
    const std::vector<double> w{-1.3, -0.25};
    auto s = enumerate_r_nr(w, 3);
    CHECK(contains(s.resonant, MultiIndex{-1, 2}));
    for (const MultiIndex& m : {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{2, -1}}) CHECK(contains(s.nonresonant, m));

    auto s1 = enumerate_r_nr(w, 1);
    CHECK(s1.resonant.empty());
    CHECK(s1.nonresonant == IndexSet{MultiIndex{0, 1}, MultiIndex{1, 0}});

    // degree-zero indices never appear (radius 2 stops short of the (-1,2) relation)
    auto s2 = enumerate_r_nr({-2.0, -1.0}, 2);
    CHECK_FALSE(contains(s2.resonant, MultiIndex{1, -1}));
    CHECK_FALSE(contains(s2.nonresonant, MultiIndex{1, -1}));
}

TEST_CASE("enumerate_r_nr rejects a resonant frequency vector") {
    CHECK_THROWS_AS(enumerate_r_nr({-2.0, -1.0}, 3), FrequencyResonant);   // (-1,2).omega = 0
}

TEST_CASE("minimal resonant set") {
    CHECK(minimal_resonant({MultiIndex{-2, 3}, MultiIndex{-1, 2}}) == IndexSet{MultiIndex{-1, 2}});
    CHECK(minimal_resonant({}).empty());
    CHECK(minimal_resonant({MultiIndex{-1, 2}}) == IndexSet{MultiIndex{-1, 2}});
}

TEST_CASE("truncated nonresonant set") {
    const std::vector<double> w{-1.3, -0.25};
    auto s = enumerate_r_nr(w, 6);
    auto rmin = minimal_resonant(s.resonant);
    auto nr1 = nonresonant_truncated(s.nonresonant, rmin);
    CHECK(nr1 == IndexSet{MultiIndex{0, 1}, MultiIndex{1, 0}, MultiIndex{2, -1}});
    CHECK(contains(s.nonresonant, MultiIndex{3, -2}));
    CHECK_FALSE(contains(nr1, MultiIndex{3, -2}));

    CHECK(nonresonant_truncated(s.nonresonant, {}) == s.nonresonant);

    auto sets = index_sets_stabilized({-2.0, -0.5}, 8);
    CHECK(sets.minimal_resonant == IndexSet{MultiIndex{-1, 2}});
    CHECK(sets.truncated_nonresonant == IndexSet{MultiIndex{0, 1}, MultiIndex{1, 0}, MultiIndex{2, -1}});
    auto ref = oracle::brute_sets({-2.0, -0.5}, 6);
    CHECK(as_set(sets.minimal_resonant) == ref.R_min);
    CHECK(as_set(sets.truncated_nonresonant) == ref.NR_1);
}

TEST_CASE("index set stabilization") {
    auto s = index_sets_stabilized({-1.3, -0.25}, 8);
    CHECK(s.stabilized);
    CHECK(s.radius_used <= 6);

    auto one = index_sets_stabilized({-0.7}, 8);
    CHECK(one.minimal_resonant.empty());
    CHECK(one.truncated_nonresonant == IndexSet{MultiIndex{1}});

    // (-1,2).omega = 2e-5: barely resonant; the sets still change at radius 3,
    // so a cap of 3 cannot see two quiet increments
    const std::vector<double> slow{-2.0, -1.0 + 1e-5};
    CHECK(as_set(index_sets_upto(slow, 8).minimal_resonant) == oracle::brute_sets(slow, 8).R_min);
    CHECK(oracle::brute_sets(slow, 3).NR_1 != oracle::brute_sets(slow, 1).NR_1);
    CHECK_THROWS_AS(index_sets_stabilized(slow, 3), NotStabilized);
    CHECK_FALSE(index_sets_upto(slow, 3).stabilized);
}

TEST_CASE("composition tuples") {
    const IndexSet nr1{MultiIndex{0, 1}, MultiIndex{1, 0}, MultiIndex{2, -1}};
    const MultiIndex e1{1, 0}, e2{0, 1};

    auto a = enumerate_A(1, MultiIndex{-1, 2}, nr1);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == std::vector<MultiIndex>{e2, e1, e2});

    auto b = enumerate_A(1, MultiIndex{2, -1}, nr1);
    REQUIRE(b.size() == 1);
    CHECK(b[0] == std::vector<MultiIndex>{e1, e2, e1});

    // five slots cannot carry an absolute sum of 3
    CHECK(enumerate_A(2, MultiIndex{-1, 2}, nr1).empty());
    CHECK(enumerate_A(3, MultiIndex{2, -1}, nr1).empty());

    // constraints hold for every tuple, and the list is sorted
    const IndexSet pool = index_sets_stabilized({-1.1, -0.6, -0.15}, 8).truncated_nonresonant;
    for (const auto& target : pool) {
        for (int order = 1; order <= 2; ++order) {
            auto tuples = enumerate_A(order, target, pool);
            CHECK(std::is_sorted(tuples.begin(), tuples.end()));
            for (const auto& t : tuples) {
                REQUIRE(static_cast<int>(t.size()) == 2 * order + 1);
                std::vector<int> signed_sum(3, 0), abs_sum(3, 0);
                for (std::size_t i = 0; i < t.size(); ++i)
                    for (int j = 0; j < 3; ++j) {
                        signed_sum[j] += (i % 2 == 0 ? 1 : -1) * t[i][j];
                        abs_sum[j] += std::abs(t[i][j]);
                    }
                CHECK(signed_sum == target.e);
                CHECK(abs_sum == target.abs().e);
            }
        }
    }
}

TEST_CASE("integer relations of any degree") {
    auto r = find_integer_relation({-4.0, -1.0}, 8);
    REQUIRE(r.has_value());
    CHECK(*r == MultiIndex{1, -4});
    CHECK_FALSE(find_integer_relation({-1.3, -0.25 - 1e-3}, 8).has_value());
}

TEST_CASE("partition, minimality and unit membership over random frequencies") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, -0.05);
    int tested = 0;
    while (tested < 20) {
        const int N = 2 + tested % 3;   // up to four modes
        std::vector<double> w(N);
        for (double& v : w) v = U(rng);
        std::sort(w.begin(), w.end());
        const int radius = N == 4 ? 5 : 7;
        if (oracle::min_combination(w, radius) <= 1e-6) continue;
        ++tested;

        auto split = enumerate_r_nr(w, radius);
        auto ref = oracle::brute_sets(w, radius);
        CHECK(as_set(split.resonant) == ref.R);
        CHECK(as_set(split.nonresonant) == ref.NR);
        for (const auto& m : split.resonant) CHECK_FALSE(contains(split.nonresonant, m));

        auto rmin = minimal_resonant(split.resonant);
        for (const auto& a : rmin)
            for (const auto& b : rmin)
                if (a != b) CHECK_FALSE(precedes(a.abs(), b.abs()));
        auto nr1 = nonresonant_truncated(split.nonresonant, rmin);
        CHECK(as_set(nr1) == ref.NR_1);
        for (int j = 0; j < N; ++j) CHECK(contains(nr1, MultiIndex::unit(N, j)));
        for (const auto& m : rmin) {
            CHECK(m.degree() == 1);
            CHECK(m.dot(w) > 0);
        }
    }
}

TEST_CASE("lattice visitor covers the ball") {
    int count = 0;
    for_each_index(2, 2, [&](const std::vector<int>& m) {
        CHECK(std::abs(m[0]) + std::abs(m[1]) <= 2);
        ++count;
    });
    CHECK(count == 13);
}
