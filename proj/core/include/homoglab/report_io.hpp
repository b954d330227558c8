#pragma once

#include <iosfwd>
#include <string>

#include "homoglab/study.hpp"

namespace homoglab::report {

enum class Format { csv, json };

/// "csv" or "json"; throws ConfigError otherwise.
Format parse_format(const std::string& name);

/// Columns equation,metric,eps,lhs,rhs_norm,ratio,slope; the slope of an
/// exactly-zero metric is written as "exact".
void write_csv(const study::ConvergenceReport& report, std::ostream& out);
/// Rows, per-metric summaries and the environment block.
void write_json(const study::ConvergenceReport& report, std::ostream& out);

/// Writes the report to path; throws Error naming the path on I/O failure.
void emit(const study::ConvergenceReport& report, const std::string& path, Format format);

} // namespace homoglab::report
