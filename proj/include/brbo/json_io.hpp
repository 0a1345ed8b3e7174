#pragma once

#include "brbo/analyses.hpp"
#include "brbo/decompose.hpp"
#include "brbo/select.hpp"
#include "brbo/verify.hpp"

#include <json.hpp>

namespace brbo {

using json = nlohmann::json;

// Integers that fit in 64 bits are emitted as JSON numbers, larger ones as
// decimal strings.
json int_to_json(const Int& n);
Int int_from_json(const json& j);

json store_to_json(const Store& s);
json trace_to_json(const Program& p, const Path& path);

json decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(const json& j);
Decomposition load_decomposition(const std::string& path);

json verdict_to_json(const Program& p, const Verdict& v);
json selection_trace_to_json(const SelectionTrace& t);
json difftest_to_json(const DifftestSummary& s);
json probe_to_json(const NiProbeReport& r);
json analyses_to_json(const DomTree& dt, const ConstMap& cm);

} // namespace brbo
