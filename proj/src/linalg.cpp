#include "crrigid/linalg.hpp"

#include <algorithm>
#include <set>

namespace crr {

SparseRow makeRow(const std::vector<Real> &dense) {
    SparseRow r;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (!dense[i].isZero()) r.emplace_back(static_cast<int>(i), dense[i]);
    return r;
}

void axpy(SparseRow &a, const Real &f, const SparseRow &b) {
    if (f.isZero() || b.empty()) return;
    SparseRow out;
    out.reserve(a.size() + b.size());
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->first < j->first)) {
            out.push_back(std::move(*i++));
        } else if (i == a.end() || j->first < i->first) {
            out.emplace_back(j->first, f * j->second);
            ++j;
        } else {
            Real v = std::move(i->second);
            addMul(v, f, j->second);
            if (!v.isZero()) out.emplace_back(i->first, std::move(v));
            ++i;
            ++j;
        }
    }
    a.swap(out);
}

namespace {
void normalize(SparseRow &r) {
    Real inv = r.front().second.inv();
    for (auto &e : r) e.second *= inv;
}
} // namespace

SparseRow Echelon::reduce(SparseRow row) const {
    // rows are fully reduced, so one pass over pivot columns suffices; walk
    // by index since the row changes under us
    for (std::size_t k = 0; k < row.size();) {
        int c = row[k].first;
        int p = pivotRow_[c];
        if (p < 0) {
            ++k;
            continue;
        }
        Real f = -row[k].second;
        axpy(row, f, rows_[p]);
        // entry k is gone; columns before k are untouched by a reduced row
        // whose pivot is c, so continue at the same position
    }
    return row;
}

bool Echelon::add(SparseRow row) {
    for (auto &e : row)
        if (e.first < 0 || e.first >= ncols_) throw std::out_of_range("column out of range");
    row = reduce(std::move(row));
    if (row.empty()) return false;
    normalize(row);
    int c = row.front().first;
    // clear column c from the existing rows
    for (auto &r : rows_) {
        auto it = std::lower_bound(r.begin(), r.end(), c,
                                   [](const auto &e, int col) { return e.first < col; });
        if (it != r.end() && it->first == c) {
            Real f = -it->second;
            axpy(r, f, row);
        }
    }
    pivotRow_[c] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(row));
    return true;
}

bool Echelon::contains(SparseRow row) const { return reduce(std::move(row)).empty(); }

std::vector<int> Echelon::pivots() const {
    std::vector<int> p;
    for (int c = 0; c < ncols_; ++c)
        if (pivotRow_[c] >= 0) p.push_back(c);
    return p;
}

std::vector<int> Echelon::freeColumns() const {
    std::vector<int> f;
    for (int c = 0; c < ncols_; ++c)
        if (pivotRow_[c] < 0) f.push_back(c);
    return f;
}

std::vector<std::vector<Real>> Echelon::kernel() const {
    std::vector<std::vector<Real>> out;
    for (int f : freeColumns()) {
        std::vector<Real> v(ncols_);
        v[f] = Real(1);
        for (const auto &r : rows_) {
            auto it = std::lower_bound(r.begin(), r.end(), f,
                                       [](const auto &e, int col) { return e.first < col; });
            if (it != r.end() && it->first == f) v[r.front().first] = -it->second;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<SparseRow> eliminateColumns(std::vector<SparseRow> rows, int split) {
    std::vector<bool> alive(rows.size(), true);
    // rows still holding a high column, keyed by length
    std::set<std::pair<std::size_t, std::size_t>> queue;
    std::vector<std::set<std::size_t>> colRows;
    auto hasHigh = [&](const SparseRow &r) { return !r.empty() && r.back().first >= split; };
    auto track = [&](std::size_t i) {
        for (auto &e : rows[i])
            if (e.first >= split) {
                std::size_t c = static_cast<std::size_t>(e.first - split);
                if (c >= colRows.size()) colRows.resize(c + 1);
                colRows[c].insert(i);
            }
        if (hasHigh(rows[i])) queue.emplace(rows[i].size(), i);
    };
    auto untrack = [&](std::size_t i) {
        for (auto &e : rows[i])
            if (e.first >= split) colRows[static_cast<std::size_t>(e.first - split)].erase(i);
        queue.erase({rows[i].size(), i});
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) alive[i] = false;
        else track(i);
    }
    while (!queue.empty()) {
        std::size_t p = queue.begin()->second;
        untrack(p);
        alive[p] = false;
        SparseRow piv = std::move(rows[p]);
        // pivot on the high column appearing in the fewest other rows
        std::size_t best = 0;
        int bestCol = -1;
        for (auto &e : piv)
            if (e.first >= split) {
                std::size_t n = colRows[static_cast<std::size_t>(e.first - split)].size();
                if (bestCol < 0 || n < best) {
                    best = n;
                    bestCol = e.first;
                }
            }
        Real pinv;
        for (auto &e : piv)
            if (e.first == bestCol) pinv = e.second.inv();
        std::vector<std::size_t> targets(colRows[static_cast<std::size_t>(bestCol - split)].begin(),
                                         colRows[static_cast<std::size_t>(bestCol - split)].end());
        for (std::size_t t : targets) {
            untrack(t);
            Real coef;
            for (auto &e : rows[t])
                if (e.first == bestCol) coef = e.second;
            axpy(rows[t], -(coef * pinv), piv);
            if (rows[t].empty()) alive[t] = false;
            else track(t);
        }
    }
    std::vector<SparseRow> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (alive[i]) out.push_back(std::move(rows[i]));
    return out;
}

} // namespace crr
