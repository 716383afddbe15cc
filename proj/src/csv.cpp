#include "pbc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ShapeError("no column named " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        std::size_t used = 0;
        const double v = std::stod(r[c], &used);
        if (used != r[c].size()) throw ShapeError("non-numeric cell in column " + name);
        out.push_back(v);
    }
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> trace_header(const SimulationTrace& tr, int m) {
    std::vector<std::string> h{"t"};
    auto block = [&h](const char* prefix, int count) {
        for (int i = 1; i <= count; ++i) h.push_back(prefix + std::to_string(i));
    };
    block("x", tr.layout.n);
    block("xc", tr.layout.nc);
    block("xl", tr.layout.nl);
    block("psi", tr.layout.npsi);
    block("u", m);
    h.push_back("storage");
    return h;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimulationTrace& tr) {
    const int m = tr.inputs.empty() ? 0 : static_cast<int>(tr.inputs.front().size());
    write_row(out, trace_header(tr, m));
    std::string line;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        line = format_number(tr.times[k]);
        for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) (line += ',') += format_number(tr.states[k][i]);
        for (Eigen::Index i = 0; i < tr.inputs[k].size(); ++i) (line += ',') += format_number(tr.inputs[k][i]);
        (line += ',') += format_number(tr.storage[k]);
        out << line << '\n';
    }
}

void write_csv(std::ostream& out, const CsvTable& table) {
    write_row(out, table.header);
    for (const auto& r : table.rows) write_row(out, r);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ShapeError("empty CSV");
    if (!line.empty() && line.back() == '\r') throw ShapeError("CSV must use LF line endings");
    t.header = split(line);
    std::set<std::string> seen;
    for (const auto& h : t.header) {
        if (h.empty()) throw ShapeError("empty CSV header name");
        if (!seen.insert(h).second) throw ShapeError("duplicate CSV header name " + h);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.back() == '\r') throw ShapeError("CSV must use LF line endings");
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw ShapeError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return read_csv(in);
}

void validate_trace_table(const CsvTable& table) {
    const auto& h = table.header;
    if (h.size() < 3 || h.front() != "t" || h.back() != "storage")
        throw ShapeError("trace CSV must start with t and end with storage");
    // Blocks appear in the fixed order x, xc, xl, psi, u, each numbered from 1.
    const char* order[] = {"x", "xc", "xl", "psi", "u"};
    std::size_t i = 1;
    for (const char* prefix : order) {
        int k = 1;
        while (i + 1 < h.size() && h[i] == prefix + std::to_string(k)) {
            ++i;
            ++k;
        }
    }
    if (i + 1 != h.size()) throw ShapeError("unexpected trace column " + h[i]);
    if (table.column("x1") < 0 || table.column("u1") < 0) throw ShapeError("trace CSV needs x and u columns");
    for (const auto& name : h) table.numeric_column(name);
}

}  // namespace pbc
