#pragma once
// Integer lattice bookkeeping for a vector of bound-state frequencies:
// degree-one multi-indices, their resonant / non-resonant split, the minimal
// resonant set, the truncated non-resonant set, and the slot compositions used
// to assemble nonlinear source terms.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace solsel {

struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries) : e(std::move(entries)) {}
    MultiIndex(std::initializer_list<int> entries) : e(entries) {}

    static MultiIndex unit(int dim, int j);

    int size() const { return static_cast<int>(e.size()); }
    int operator[](int j) const { return e[j]; }
    int& operator[](int j) { return e[j]; }

    std::int64_t degree() const;      // sum of entries
    std::int64_t norm() const;        // sum of |entries|
    MultiIndex abs() const;
    bool is_unit() const;             // some e_j
    int unit_slot() const;            // j if is_unit(), else -1
    double dot(const std::vector<double>& omega) const;

    std::string str() const;          // "(-1,2)"

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);

// componentwise a <= b, and strict version (a <= b, a != b)
bool precedes(const MultiIndex& a, const MultiIndex& b);
bool strictly_precedes(const MultiIndex& a, const MultiIndex& b);

using IndexSet = std::vector<MultiIndex>;   // always sorted, unique

inline constexpr double kResonanceTol = 1e-9;

// All m with sum(m) = 1 and ||m|| <= radius, split by the sign of m.omega.
// Throws FrequencyResonant if |m.omega| <= tol for any of them.
struct DegreeOneSplit {
    IndexSet resonant;      // m.omega > 0
    IndexSet nonresonant;   // m.omega < 0
};
DegreeOneSplit enumerate_r_nr(const std::vector<double>& omega, int radius, double tol = kResonanceTol);

IndexSet minimal_resonant(const IndexSet& resonant);
IndexSet nonresonant_truncated(const IndexSet& nonresonant, const IndexSet& minimal);

struct IndexSets {
    IndexSet minimal_resonant;
    IndexSet truncated_nonresonant;
    int radius_used = 0;
    bool stabilized = false;
};

// Grows the radius from 1 until both sets are unchanged over two consecutive
// increments.  Throws NotStabilized when max_radius is exhausted.
IndexSets index_sets_stabilized(const std::vector<double>& omega, int max_radius, double tol = kResonanceTol);

// Same loop but never throws on non-stabilization; the flag tells.
IndexSets index_sets_upto(const std::vector<double>& omega, int max_radius, double tol = kResonanceTol);

// Tuples (m_1..m_{2k+1}) over `pool` with sum_odd - sum_even = target and
// sum_i |m_i| = |target| componentwise.  Lexicographic order.
std::vector<std::vector<MultiIndex>> enumerate_A(int order, const MultiIndex& target, const IndexSet& pool);

// Full integer-relation check over every m != 0 with ||m|| <= radius (any
// degree).  Returns the offending m (first nonzero entry positive) if one has
// |m.omega| <= tol.
std::optional<MultiIndex> find_integer_relation(const std::vector<double>& omega, int radius, double tol = kResonanceTol);

// Calls f(std::vector<int>&) for every m in Z^dim with ||m|| <= radius.
template <class F>
void for_each_index(int dim, int radius, F&& f);

} // namespace solsel

#include "solsel/detail/lattice_impl.hpp"
