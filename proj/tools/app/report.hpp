#pragma once
// Machine-readable outputs: JSON documents and CSV tables.  Column layouts
// are defined here once and documented in docs/schemas.md.

#include "solsel/experiment.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace solsel::app {

using nlohmann::json;

// "[-1;2]" - multi-indices in column names and CSV cells (no commas)
std::string index_label(const MultiIndex& m);

// Every JSON document carries these: tool version, the full scenario and the
// thresholds that decided PASS/FAIL.
json provenance(const ScenarioSpec& sc, unsigned long long seed);
json scenario_json(const ScenarioSpec& sc);
json thresholds_json(const ScenarioSpec& sc);

json to_json(const MultiIndex& m);
json to_json(const IndexSet& s);
json to_json(const IndexSets& s);
json to_json(const SpectralData& s);
json to_json(const ZeroEnergyCheck& z);
json to_json(const FgrEntry& e);
json to_json(const FgrCheck& c);
json to_json(const ValidationReport& v);
json to_json(const DiagnosticSeries& d);   // summary only, samples go to CSV
json to_json(const Comparison& c);
json to_json(const Absorber& a);
json profile_json(const ProfileSet& ps, const ScalingStudy& scaling, const std::vector<IdentityCheck>& identity);
json selection_json(const SelectionReport& r);

json complex_json(cplx z);
json zvec_json(const ZVec& z);

// CSV tables.  Numbers use the shortest round-trip form; NaN prints as "nan".
std::vector<std::string> eigenfunctions_columns(int n_bound);
std::vector<std::string> series_columns();
std::vector<std::string> snapshot_columns();
std::vector<std::string> diagnostics_columns(int n_modes, const std::vector<MultiIndex>& resonant);
std::vector<std::string> reduced_columns(int n_modes, const std::vector<MultiIndex>& resonant);
std::vector<std::string> comparison_columns(int n_modes);
std::vector<std::string> scaling_columns();
std::vector<std::string> fgr_table_columns();
std::vector<std::string> profile_columns(const std::vector<MultiIndex>& labels, const std::string& prefix);

void write_eigenfunctions_csv(std::ostream& out, const SpectralData& s);
void write_series_csv(std::ostream& out, const RunRecord& rec);
void write_snapshot_csv(std::ostream& out, const Grid& g, const CVec& u);
void write_diagnostics_csv(std::ostream& out, const DiagnosticSeries& d);
void write_reduced_csv(std::ostream& out, const ReducedTrajectory& r, const std::vector<MultiIndex>& resonant);
void write_comparison_csv(std::ostream& out, const Comparison& c);
void write_scaling_csv(std::ostream& out, const ScalingStudy& st);
void write_fgr_table_csv(std::ostream& out, const std::vector<FgrEntry>& entries);
// x plus one column per function, named prefix + index_label
void write_profile_csv(std::ostream& out, const Grid& g, const std::map<MultiIndex, RVec>& fns, const std::string& prefix);

// Minimal CSV reader for the tables above (no quoting is ever needed).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> cells;
    int column(const std::string& name) const;   // -1 if absent
    double value(std::size_t row, int col) const;
    std::size_t size() const { return cells.size(); }
};
CsvTable read_csv(std::istream& in);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

} // namespace solsel::app
