#pragma once

// JSON encodings of spec and analyser values used by descriptors, the pool index and
// structured reports. Decoders throw Error(E_INVALID_SPEC) on malformed documents.

#include "json.hpp"

#include "adapterforge/analyser.hpp"
#include "adapterforge/spec.hpp"

namespace adapterforge::codec {

using json = nlohmann::json;

/// Canonical text of a document: keys sorted, 2-space indent, UTF-8, trailing newline.
std::string canonical(const json& doc);
/// Parses JSON text, mapping parser failures to E_INVALID_SPEC.
json parse_json(std::string_view text, std::string_view what);

json encode(const spec::Value& v);
spec::Value decode_value(const json& j);

json encode(const spec::SemType& t);
spec::SemType decode_type(const json& j);

json encode(const spec::InterfaceSpec& iface);
spec::InterfaceSpec decode_interface(const json& j);

json encode(const spec::Connection& c);
spec::Connection decode_connection(const json& j);

json encode(const Rational& r);
Rational decode_rational(const json& j);

json encode(const analyser::ConversionRule& r);
analyser::ConversionRule decode_rule(const json& j);

json encode(const analyser::Mismatch& m);
analyser::Mismatch decode_mismatch(const json& j);

json encode(const analyser::OperationMatch& m);
analyser::OperationMatch decode_operation_match(const json& j);

json encode(const analyser::Demand& d);
analyser::Demand decode_demand(const json& j);

json encode(const analyser::MatchReport& r);
analyser::MatchReport decode_match_report(const json& j);

}  // namespace adapterforge::codec
