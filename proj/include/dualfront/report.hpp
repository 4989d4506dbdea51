#pragma once

// JSON reports. Field order is fixed and floating-point numbers are printed
// with 17 significant digits, so identical runs give identical bytes.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dualfront/classify.hpp"
#include "dualfront/cusp.hpp"
#include "dualfront/zeroset.hpp"

namespace dualfront {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

/// Two-space indented JSON; doubles as %.17g, non-finite numbers as null.
void write_json(std::ostream& out, const Json& j);
std::string dump_json(const Json& j);

Json to_json(const Tolerances& tol);
Json to_json(const ClassifyOptions& opt);
Json to_json(const MapSpec& spec);

template <class T>
Json to_json(const ContactChain<T>& c);
template <class T>
Json to_json(const SingularityClass<T>& s);
template <class T>
Json to_json(const DualityResult<T>& d);

Json to_json(const TracedCurve& c);
Json to_json(const HypothesisViolation& v);
Json to_json(const Godron& g);
Json to_json(const GodronCensus& c);
Json to_json(const EulerResult& e);

Json to_json(const CuspDetection& d);
Json to_json(const CuspidalCurvature& c);
Json to_json(const CuspReport& r);
Json to_json(const OsculatingCycloid& o);

/// Document skeleton echoing the tool version, command and input map.
Json report_document(const std::string& command, const std::string& input_path, const MapSpec& spec);

}  // namespace dualfront
