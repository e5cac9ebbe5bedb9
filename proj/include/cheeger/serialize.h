#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "cheeger/adjusted_tuples.h"
#include "cheeger/cheeger_solver.h"
#include "cheeger/closed_form.h"
#include "cheeger/grid.h"
#include "cheeger/ktuple.h"
#include "cheeger/plap_spectrum.h"

namespace cheeger::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

/// Lattice-index runs [start, length] of the set cells, ascending.
std::vector<std::pair<int, int>> run_lengths(std::vector<int> cells);
std::vector<int> from_run_lengths(const std::vector<std::pair<int, int>>& runs);

json to_json(const GridDomain& domain);
json to_json(const CellSet& set);
json to_json(const CheegerResult& result);
json to_json(const KTupleState& state);
json to_json(const AdjustmentReport& report);
json to_json(const closed_form::ClosedFormCheeger& value);
json to_json(const closed_form::RingBoundsReport& report);
json to_json(const InequalityRow& row);
json to_json(const LimitScan& scan);

/// Replacement history: step,replaced_index,old_ratio,new_ratio,objective,reason.
std::string history_csv(const KTupleState& state);
/// One row per p: p,value,lambda_1,...,lambda_k.
std::string limit_scan_csv(const LimitScan& scan);

/// Domain cells in light grey and each set as one filled path, colors
/// assigned by set index.
std::string render_svg(const GridDomain& domain, const std::vector<CellSet>& sets);

/// Writes text to a file, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

/// Stable text form: two-space indent and a trailing newline.
std::string dump(const json& value);

}  // namespace cheeger::io
