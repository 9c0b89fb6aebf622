#pragma once

#include "crrigid/scalar.hpp"

#include <utility>
#include <vector>

namespace crr {

// Sparse row over Q(sqrt d), sorted by column, no zero entries.
using SparseRow = std::vector<std::pair<int, Real>>;

SparseRow makeRow(const std::vector<Real> &dense);
// a += f * b
void axpy(SparseRow &a, const Real &f, const SparseRow &b);

// Incrementally maintained reduced row echelon form on a fixed column count.
class Echelon {
public:
    explicit Echelon(int ncols) : ncols_(ncols), pivotRow_(ncols, -1) {}

    // true if the row was independent of the rows already present
    bool add(SparseRow row);
    bool add(const std::vector<Real> &dense) { return add(makeRow(dense)); }
    bool contains(SparseRow row) const;

    int rank() const { return static_cast<int>(rows_.size()); }
    int cols() const { return ncols_; }
    std::vector<int> pivots() const;
    std::vector<int> freeColumns() const;
    const std::vector<SparseRow> &rows() const { return rows_; }

    // canonical kernel basis: one vector per free column f with entry 1 at f
    // and zero at the other free columns
    std::vector<std::vector<Real>> kernel() const;

private:
    SparseRow reduce(SparseRow row) const;
    int ncols_;
    std::vector<SparseRow> rows_; // each normalized with pivot entry 1
    std::vector<int> pivotRow_;
};

// Gaussian elimination of every column >= split, pivoting on the sparsest
// row. Returns the rows left over, which only touch columns < split; their
// common kernel is the projection to the low columns of the full kernel.
std::vector<SparseRow> eliminateColumns(std::vector<SparseRow> rows, int split);

} // namespace crr
