#include "perco/critical_point.hpp"

#include <fstream>
#include <sstream>

#include "pc_reference_data.hpp"

namespace perco {

CriticalPointTable::CriticalPointTable(std::vector<CriticalPointRow> rows) : rows_(std::move(rows)) {
    for (const auto& row : rows_) {
        if (!(row.pc > 0.0 && row.pc < 1.0)) throw std::invalid_argument("critical point outside (0,1)");
        if (row.source.empty()) throw std::invalid_argument("critical point row without source");
    }
}

CriticalPointTable CriticalPointTable::parse(std::istream& in) {
    std::vector<CriticalPointRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        CriticalPointRow row;
        std::string model;
        int range = 0;
        if (!(ls >> row.dim >> model >> range >> row.pc))
            throw std::invalid_argument("pc table line " + std::to_string(lineno) + ": expected 'd model L p_c source'");
        if (model == "nn")
            row.model = EdgeModel::nearest_neighbor();
        else if (model == "spread-out")
            row.model = EdgeModel::spread_out(range);
        else
            throw std::invalid_argument("pc table line " + std::to_string(lineno) + ": unknown model '" + model + "'");
        std::getline(ls >> std::ws, row.source);
        while (!row.source.empty() && (row.source.back() == '\r' || row.source.back() == ' ')) row.source.pop_back();
        if (row.source.empty()) throw std::invalid_argument("pc table line " + std::to_string(lineno) + ": missing source");
        rows.push_back(std::move(row));
    }
    return CriticalPointTable(std::move(rows));
}

CriticalPointTable CriticalPointTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pc table: " + path);
    return parse(in);
}

const CriticalPointTable& CriticalPointTable::bundled() {
    static const CriticalPointTable table = [] {
        std::istringstream in{std::string(detail::kPcReferenceData)};
        return parse(in);
    }();
    return table;
}

const CriticalPointRow& CriticalPointTable::lookup(int dim, const EdgeModel& model) const {
    for (const auto& row : rows_)
        if (row.dim == dim && row.model == model) return row;
    throw NoReferenceValue("no reference value for d=" + std::to_string(dim) + " model=" + model.name() +
                           (model.is_spread_out() ? " L=" + std::to_string(model.range) : ""));
}

}  // namespace perco
