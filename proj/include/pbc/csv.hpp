#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pbc/simulation.hpp"

namespace pbc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    std::vector<double> numeric_column(const std::string& name) const;
};

std::string format_number(double v);  // %.17g, round-trips exactly

std::vector<std::string> trace_header(const SimulationTrace& tr, int m);
void write_trace_csv(std::ostream& out, const SimulationTrace& tr);
void write_csv(std::ostream& out, const CsvTable& table);

// Rejects ragged rows and empty or duplicate header names.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
// Header must follow the trace naming convention.
void validate_trace_table(const CsvTable& table);

}  // namespace pbc
