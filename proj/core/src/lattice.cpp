#include "solsel/lattice.hpp"

#include "solsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace solsel {

MultiIndex MultiIndex::unit(int dim, int j) {
    MultiIndex m(std::vector<int>(dim, 0));
    m.e[j] = 1;
    return m;
}

std::int64_t MultiIndex::degree() const {
    std::int64_t s = 0;
    for (int v : e) s += v;
    return s;
}

std::int64_t MultiIndex::norm() const {
    std::int64_t s = 0;
    for (int v : e) s += std::abs(v);
    return s;
}

MultiIndex MultiIndex::abs() const {
    MultiIndex a = *this;
    for (int& v : a.e) v = std::abs(v);
    return a;
}

bool MultiIndex::is_unit() const { return unit_slot() >= 0; }

int MultiIndex::unit_slot() const {
    int slot = -1;
    for (int j = 0; j < size(); ++j) {
        if (e[j] == 0) continue;
        if (e[j] != 1 || slot >= 0) return -1;
        slot = j;
    }
    return slot;
}

double MultiIndex::dot(const std::vector<double>& omega) const {
    // integer entries are small; summing in long double keeps cancellation honest
    long double s = 0;
    for (int j = 0; j < size(); ++j) s += static_cast<long double>(e[j]) * omega[j];
    return static_cast<double>(s);
}

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '(';
    for (int j = 0; j < size(); ++j) os << (j ? "," : "") << e[j];
    os << ')';
    return os.str();
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex c = a;
    for (int j = 0; j < c.size(); ++j) c.e[j] += b.e[j];
    return c;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex c = a;
    for (int j = 0; j < c.size(); ++j) c.e[j] -= b.e[j];
    return c;
}

bool precedes(const MultiIndex& a, const MultiIndex& b) {
    for (int j = 0; j < a.size(); ++j)
        if (a.e[j] > b.e[j]) return false;
    return true;
}

bool strictly_precedes(const MultiIndex& a, const MultiIndex& b) {
    return precedes(a, b) && a != b;
}

namespace {

void check_omega(const std::vector<double>& omega) {
    if (omega.empty()) throw InvalidArgument("empty frequency vector");
    for (std::size_t j = 0; j < omega.size(); ++j) {
        if (!(omega[j] < 0)) throw InvalidArgument("frequencies must be negative");
        if (j && !(omega[j - 1] < omega[j])) throw InvalidArgument("frequencies must be strictly increasing");
    }
}

// Degree-one vectors: fix the last entry from the others.
template <class F>
void for_each_degree_one(int dim, int radius, F&& f) {
    if (dim == 1) {
        std::vector<int> one{1};
        if (radius >= 1) f(one);
        return;
    }
    std::vector<int> head(dim - 1, 0), full(dim, 0);
    for_each_index(dim - 1, radius, [&](const std::vector<int>& h) {
        std::int64_t s = 0, n = 0;
        for (int v : h) { s += v; n += std::abs(v); }
        const std::int64_t last = 1 - s;
        if (n + std::abs(last) > radius) return;
        std::copy(h.begin(), h.end(), full.begin());
        full.back() = static_cast<int>(last);
        f(full);
    });
}

} // namespace

DegreeOneSplit enumerate_r_nr(const std::vector<double>& omega, int radius, double tol) {
    check_omega(omega);
    if (radius < 1) throw InvalidArgument("radius must be >= 1");
    DegreeOneSplit out;
    const int dim = static_cast<int>(omega.size());
    for_each_degree_one(dim, radius, [&](const std::vector<int>& m) {
        MultiIndex mi(m);
        const double r = mi.dot(omega);
        if (std::abs(r) <= tol)
            throw FrequencyResonant("m=" + mi.str() + " has |m.omega| = " + std::to_string(std::abs(r)));
        (r > 0 ? out.resonant : out.nonresonant).push_back(std::move(mi));
    });
    std::sort(out.resonant.begin(), out.resonant.end());
    std::sort(out.nonresonant.begin(), out.nonresonant.end());
    return out;
}

IndexSet minimal_resonant(const IndexSet& resonant) {
    IndexSet out;
    for (const auto& m : resonant) {
        const MultiIndex am = m.abs();
        bool dominated = false;
        for (const auto& n : resonant)
            if (strictly_precedes(n.abs(), am)) { dominated = true; break; }
        if (!dominated) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

IndexSet nonresonant_truncated(const IndexSet& nonresonant, const IndexSet& minimal) {
    IndexSet out;
    for (const auto& m : nonresonant) {
        const MultiIndex am = m.abs();
        bool above = false;
        for (const auto& n : minimal)
            if (strictly_precedes(n.abs(), am)) { above = true; break; }
        if (!above) out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

IndexSets index_sets_upto(const std::vector<double>& omega, int max_radius, double tol) {
    if (max_radius < 3) throw InvalidArgument("max_radius must be >= 3");
    IndexSets cur, prev;
    int unchanged = 0;
    for (int r = 1; r <= max_radius; ++r) {
        auto split = enumerate_r_nr(omega, r, tol);
        cur.minimal_resonant = minimal_resonant(split.resonant);
        cur.truncated_nonresonant = nonresonant_truncated(split.nonresonant, cur.minimal_resonant);
        cur.radius_used = r;
        if (r > 1 && cur.minimal_resonant == prev.minimal_resonant &&
            cur.truncated_nonresonant == prev.truncated_nonresonant)
            ++unchanged;
        else
            unchanged = 0;
        if (unchanged >= 2) {
            cur.stabilized = true;
            return cur;
        }
        prev = cur;
    }
    cur.stabilized = false;
    return cur;
}

IndexSets index_sets_stabilized(const std::vector<double>& omega, int max_radius, double tol) {
    IndexSets s = index_sets_upto(omega, max_radius, tol);
    if (!s.stabilized)
        throw NotStabilized("index sets still changing at radius " + std::to_string(max_radius));
    return s;
}

namespace {

struct ComposeState {
    const std::vector<MultiIndex>* pool;
    const MultiIndex* target;
    int slots;
    std::vector<int> budget;     // remaining |target| per component
    std::vector<MultiIndex> cur;
    std::vector<std::vector<MultiIndex>> out;
};

void compose(ComposeState& st, int slot, std::int64_t remaining) {
    if (slot == st.slots) {
        if (remaining == 0) st.out.push_back(st.cur);
        return;
    }
    // every pool element has norm >= 1
    if (remaining < st.slots - slot) return;
    const int sign = (slot % 2 == 0) ? 1 : -1;
    const int dim = st.target->size();
    for (const auto& c : *st.pool) {
        bool ok = true;
        std::int64_t used = 0;
        for (int j = 0; j < dim && ok; ++j) {
            const int v = sign * c.e[j];
            const int t = st.target->e[j];
            // equality in the abs-sum forces every slot to push each component
            // in the direction of the target (or not at all)
            if (v != 0 && (t == 0 || (v > 0) != (t > 0))) ok = false;
            else if (std::abs(v) > st.budget[j]) ok = false;
            used += std::abs(v);
        }
        if (!ok) continue;
        for (int j = 0; j < dim; ++j) st.budget[j] -= std::abs(c.e[j]);
        st.cur[slot] = c;
        compose(st, slot + 1, remaining - used);
        for (int j = 0; j < dim; ++j) st.budget[j] += std::abs(c.e[j]);
    }
}

} // namespace

std::vector<std::vector<MultiIndex>> enumerate_A(int order, const MultiIndex& target, const IndexSet& pool) {
    if (order < 1) throw InvalidArgument("composition order must be >= 1");
    ComposeState st;
    std::vector<MultiIndex> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    st.pool = &sorted;
    st.target = &target;
    st.slots = 2 * order + 1;
    st.budget = target.abs().e;
    st.cur.resize(st.slots);
    if (target.norm() >= st.slots) compose(st, 0, target.norm());
    return st.out;
}

std::optional<MultiIndex> find_integer_relation(const std::vector<double>& omega, int radius, double tol) {
    std::optional<MultiIndex> hit;
    const int dim = static_cast<int>(omega.size());
    for_each_index(dim, radius, [&](const std::vector<int>& m) {
        if (hit) return;
        int first = 0;
        for (int v : m)
            if (v) { first = v; break; }
        if (first <= 0) return;   // m = 0 or non-canonical sign
        MultiIndex mi(m);
        if (std::abs(mi.dot(omega)) <= tol) hit = mi;
    });
    return hit;
}

} // namespace solsel
