#pragma once

#include <string>
#include <vector>

#include "sselab/regime.hpp"

namespace sselab::regime {

// The built-in admissibility tables: for the fractional-heat family and for
// the Burgers/Navier-Stokes family, one table per scenario. Cells are either
// exact rationals or one-sided marks ("arbitrarily close from above/below");
// marks are realized as strictly inward rational offsets derived from a
// single base offset, scaled so that every row validates.
enum class TableScenario { Weak, PathwiseThetaHigh, PathwiseThetaLow };

std::string to_string(TableScenario s);

class TableError : public std::runtime_error {
public:
    TableError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row + 1) + ": " + what), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

struct EmittedRow {
    int d = 1;
    RegimeParams params;
    RegimeVerdict verdict;
    std::vector<std::string> cells;  // gamma, theta, mu, nu, rho as exact rationals
};

struct TableResult {
    ExampleClass cls;
    TableScenario scenario;
    Rational base_offset;
    bool pathwise_level = false;
    std::vector<EmittedRow> rows;
};

// Emits every row of the requested table at the given base offset,
// re-validating each through check(). Throws TableError when a row fails:
// either the offset is too large for an open range, or (never expected for
// the built-in data) a transcription-level violation, named predicate first.
TableResult emit_table(ExampleClass cls, TableScenario scenario, Rational base_offset);

struct Perturbation {
    Coord coord;
    Rational value;
};

// For each coordinate, the value just across the nearest admissibility
// boundary with the remaining coordinates fixed. By construction the verdict
// at the stated level flips for every returned perturbation.
std::vector<Perturbation> boundary_perturbations(const RegimeParams& params, bool pathwise_level,
                                                 Rational step);

std::string render_markdown(const TableResult& table);
std::string render_csv(const TableResult& table);
std::string render_json(const TableResult& table);

}  // namespace sselab::regime
