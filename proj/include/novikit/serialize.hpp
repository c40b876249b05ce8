#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "novikit/atlas.hpp"
#include "novikit/crit.hpp"
#include "novikit/expr.hpp"
#include "novikit/mc.hpp"

namespace novikit {

// JSON formats. Rationals are strings ("3", "-1/2") so no value passes
// through floating point; plain JSON integers are accepted on input.
//
//   scalar      {"terms": [{"exp": "1/2", "re": "2", "im": "0"}], "cutoff": "inf"}
//               or a text expression "2*T^(1/2) + O(T^3)"
//   series      [{"monomial": {"x": 1, "y": -1}, "coeff": scalar}]
//               or a text expression "u*v - 1"
//   constraint  {"form": {"t": 1}, "const": "0", "rel": ">=", "bound": "0"}
//               or text "val(t) - val(x1) >= A7 - A1"; "val(u) < inf"
//   domain      [constraint, ...] (a conjunction; [] is everything)
//               or {"any": [[constraint, ...], ...]}
//   atlas       {"parameters": {...}, "charts": [{name, vars, domain, potential}],
//                "transitions": [{id, src, dst, overlap, map, inverse?, inverse_overlap?}],
//                "loops": [["id", "id^-1", ...]]}
//   disc data   {"parameters": {...}, "generators": [{name, parity, kind, object}],
//                "deformation": {"X": "x"}, "commutative": true, "object_pairs": [["L", "L'"]],
//                "contributions": [{corners, output, area, sign, holonomy: [{var, power}]}]}
//
// Text fields may use the parameters declared in the file, overridden by the
// caller. Errors inside a document name its JSON path.

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become ParseError with line and column.
Json parse_json_text(std::string_view text, const std::string& source);
/// Reads and parses a file (ParseError when unreadable).
Json read_json_file(const std::string& path);

std::string rational_str(const Rational& r);
Rational rational_from_json(const Json& j, const Parameters& params, const std::string& path);

/// File parameters (in order, each may use earlier ones) with overrides.
Parameters parameters_from_json(const Json& j, const Parameters& overrides, const std::string& path);

Json to_json(const NovikovScalar& s);
NovikovScalar scalar_from_json(const Json& j, const Parameters& params, const std::string& path);

Json to_json(const MultiSeries& s);
MultiSeries series_from_json(const Json& j, const VarSet& vars, const Parameters& params, const std::string& path);

Json to_json(const Point& p);
Point point_from_json(const Json& j, const Parameters& params, const std::string& path);

Json to_json(const ValuationConstraint& c);
ValuationConstraint constraint_from_text(std::string_view text, const Parameters& params);
ValuationConstraint constraint_from_json(const Json& j, const Parameters& params, const std::string& path);
Json to_json(const Domain& d);
/// With a nonempty `ambient`, constraints must only mention its variables.
Domain domain_from_json(const Json& j, const VarSet& ambient, const Parameters& params, const std::string& path);

Json to_json(const Chart& c);
Json to_json(const Transition& t);
Json to_json(const Atlas& a);
Atlas atlas_from_json(const Json& j, const Parameters& overrides = {});

Json to_json(const DiscData& d);
DiscData disc_data_from_json(const Json& j, const Parameters& overrides = {});

Json to_json(const WordSeries& s);
Json to_json(const Outputs& o);
Json to_json(const FeasibilityResult& r);
Json to_json(const PotentialReport& r);
Json to_json(const CocycleReport& r);
Json to_json(const TransportResult& r);
Json to_json(const ObstructionReport& r);
Json to_json(const CocycleSolution& s);
Json to_json(const IsomorphismReport& r);
Json to_json(const CriticalLocus& l);

}  // namespace novikit
