#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dlab/moments.hpp"
#include "dlab/series.hpp"
#include "dlab/torus.hpp"
#include "dlab/zeros.hpp"

namespace dlab::io {

using Json = nlohmann::ordered_json;

/// Coefficient documents:
///   {"kind": "explicit", "coeffs": [[n, re, im], ...]}
///   {"kind": "multiplicative", "prime_powers": [[p, e, re, im], ...]}
///   {"kind": "builtin", "name": "zeta"}
/// Builtin names: zeta, moebius, eta-factor, divisor (with "k"), character
/// (with "modulus" and "index"). Optional "name", "sigma_m" and "sigma_a"
/// override the defaults of explicit and multiplicative documents.
SeriesSpec series_from_json(const Json& doc);
Json series_to_json(const SeriesSpec& spec);

/// "zeta", "builtin:<name>" ("builtin:divisor:3", "builtin:character:5:1")
/// or a path to a coefficient document.
SeriesSpec resolve_series(std::string_view ref);

/// "a+bi", "a-bi", "a", "bi" with optional leading sign.
Complex parse_complex(std::string_view text);

/// Shortest decimal form that round-trips.
std::string format_double(double x);
std::string format_complex(Complex z);

/// {"dims": m, "T": ..., "step": ..., "lambda": [...]}; lambda omitted means log primes.
FlowConfig flow_config_from_json(const Json& doc);
/// [[lo, hi], ...]
Box box_from_json(const Json& doc);

Json to_json(const MomentReport& report);
std::string moment_csv_header();
std::string to_csv_row(const MomentReport& report);

Json to_json(const ZeroScan& scan);
/// re,im,residual
void write_zeros_csv(std::ostream& out, const ZeroScan& scan);

Json to_json(const std::vector<DensityRow>& rows);
/// sigma,T,count
void write_density_csv(std::ostream& out, const std::vector<DensityRow>& rows);

Json to_json(const RecurrenceReport& report);

struct FlowRow {
  double horizon;
  double estimate;
  double target;
  double error;
};
/// t-horizon,estimate,target,error
void write_flow_csv(std::ostream& out, const std::vector<FlowRow>& rows);

}  // namespace dlab::io
