#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "perco/lattice.hpp"

namespace perco {

class NoReferenceValue : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CriticalPointRow {
    int dim = 0;
    EdgeModel model;
    double pc = 0.0;
    std::string source;
};

/// Reference critical probabilities with their literature sources.
class CriticalPointTable {
public:
    CriticalPointTable() = default;
    explicit CriticalPointTable(std::vector<CriticalPointRow> rows);

    /// Parses the plain-text format of data/pc_reference.txt.
    static CriticalPointTable parse(std::istream& in);
    static CriticalPointTable load(const std::string& path);
    /// The table compiled into the library.
    static const CriticalPointTable& bundled();

    /// Throws NoReferenceValue when no row matches; there is no default.
    const CriticalPointRow& lookup(int dim, const EdgeModel& model) const;
    const std::vector<CriticalPointRow>& rows() const { return rows_; }

private:
    std::vector<CriticalPointRow> rows_;
};

inline double pc_reference(int dim, const EdgeModel& model) { return CriticalPointTable::bundled().lookup(dim, model).pc; }

}  // namespace perco
