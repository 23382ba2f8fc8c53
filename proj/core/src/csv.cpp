#include "qxval/csv.h"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qxval::csv {

namespace {

constexpr const char* kReplicaHeader = "replica,model,n_mem,d_km,completion_s,rounds,attempts";
constexpr const char* kSummaryHeader =
    "experiment,config_index,model,metric,n_mem,d_km,p_g,p_m,tau_ms,n,mean,stddev,oracle,z";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& s, const char* what) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("csv: bad ") + what + " value '" + s + "'");
  }
}

ProtocolModel parse_model(const std::string& s) {
  if (s == "quisp") return ProtocolModel::kRoundTrain;
  if (s == "sequence") return ProtocolModel::kPerPairHandshake;
  throw std::invalid_argument("csv: unknown model '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_replica_csv(std::ostream& out, const std::vector<xval::ReplicaRow>& rows) {
  out << kReplicaHeader << '\n';
  for (const auto& r : rows) {
    out << r.replica << ',' << model_name(r.model) << ',' << r.n_mem << ','
        << format_double(r.d_km) << ',' << format_double(r.completion_s) << ',' << r.rounds << ','
        << r.attempts << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<xval::SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.config_index << ',' << model_name(r.model) << ',' << r.metric
        << ',' << r.n_mem << ',' << format_double(r.d_km) << ',';
    if (r.has_noise_dims) {
      out << format_double(r.p_g) << ',' << format_double(r.p_m) << ','
          << format_double(r.tau_s * 1e3) << ',';
    } else {
      out << ",,,";
    }
    out << r.n << ',' << format_double(r.mean) << ',' << format_double(r.stddev) << ','
        << format_double(r.oracle) << ',' << format_double(r.z) << '\n';
  }
}

std::vector<xval::SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty summary file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSummaryHeader)
    throw std::invalid_argument("csv: unexpected summary header '" + line + "'");

  std::vector<xval::SummaryRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 14)
      throw std::invalid_argument("csv: expected 14 fields, got " + std::to_string(f.size()));
    xval::SummaryRow r;
    r.experiment = static_cast<int>(parse_double(f[0], "experiment"));
    r.config_index = static_cast<int>(parse_double(f[1], "config_index"));
    r.model = parse_model(f[2]);
    r.metric = f[3];
    r.n_mem = static_cast<int>(parse_double(f[4], "n_mem"));
    r.d_km = parse_double(f[5], "d_km");
    r.has_noise_dims = !(f[6].empty() && f[7].empty() && f[8].empty());
    if (r.has_noise_dims) {
      r.p_g = parse_double(f[6], "p_g");
      r.p_m = parse_double(f[7], "p_m");
      r.tau_s = parse_double(f[8], "tau_ms") * 1e-3;
    }
    r.n = static_cast<int>(parse_double(f[9], "n"));
    r.mean = parse_double(f[10], "mean");
    r.stddev = parse_double(f[11], "stddev");
    r.oracle = parse_double(f[12], "oracle");
    r.z = parse_double(f[13], "z");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace qxval::csv
