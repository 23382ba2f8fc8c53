#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qxval/xval.h"

namespace qxval::csv {

/// Deterministic shortest-ish float formatting used by every writer (%.12g);
/// identical inputs always produce identical bytes.
std::string format_double(double v);

// Per-replica link-generation records.
// Columns: replica,model,n_mem,d_km,completion_s,rounds,attempts
void write_replica_csv(std::ostream& out, const std::vector<xval::ReplicaRow>& rows);

// Per-configuration aggregates, one row per (configuration, model).
// Columns: experiment,config_index,model,metric,n_mem,d_km,p_g,p_m,tau_ms,
//          n,mean,stddev,oracle,z
// p_g/p_m/tau_ms are empty for timing rows; tau_ms is "inf" when undamped.
void write_summary_csv(std::ostream& out, const std::vector<xval::SummaryRow>& rows);

/// Parses a summary CSV produced by write_summary_csv. Throws
/// std::invalid_argument on a malformed header or row.
std::vector<xval::SummaryRow> read_summary_csv(std::istream& in);

}  // namespace qxval::csv
