#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ietlab/iet.hpp"
#include "ietlab/mixing.hpp"
#include "ietlab/return_map.hpp"
#include "ietlab/rigidity.hpp"
#include "ietlab/verifier.hpp"

namespace ietlab {

using json = nlohmann::json;

inline constexpr const char* kSchema = "iet-lab/v1";

// Scalars are written as canonical text; integers are accepted on input.
json to_json(const ExactScalar& x);
ExactScalar scalar_from_json(const json& j, const std::string& where);

json to_json(const Interval& i);  // ["lo", "hi"]
Interval interval_from_json(const json& j, const std::string& where);
json to_json(const IntervalSet& s);
IntervalSet interval_set_from_json(const json& j, const std::string& where);

struct IetDocument {
  IET iet;
  std::string name;  // optional, "" when absent
};

// {"lengths": [...], "perm": [...], "field_D": D} plus optional "schema" and
// "name". field_D must match the data.
json iet_to_json(const IET& t, const std::string& name = "");
IetDocument iet_from_json(const json& j);

json to_json(const RigidityCertificate& c);
RigidityCertificate certificate_from_json(const json& j);

json to_json(const ReturnSystem& rs, const IntervalSet& uncovered = {});
struct ReturnMapDocument {
  ReturnSystem system;
  IntervalSet uncovered;
};
ReturnMapDocument return_map_from_json(const json& j);

json to_json(const IdocReport& r);
IdocReport idoc_from_json(const json& j);

json to_json(const BackwardPartition& bp, const std::vector<PairClass>& classes);
struct PartitionDocument {
  BackwardPartition partition;
  std::vector<PairClass> classes;
};
PartitionDocument partition_from_json(const json& j);

json to_json(const MixingWindowResult& r, long long j, long long k, const ExactScalar& eps, int depth);
json to_json(const BlockWitness& w);
BlockWitness block_witness_from_json(const json& j);
json to_json(const VerificationReport& r);

// Throws ParseError with the offending position.
json parse_json_text(const std::string& text, const std::string& where);
std::string read_text_file(const std::string& path);  // throws ParseError
// Canonical formatting used for every artifact: two-space indent, sorted keys,
// trailing newline.
std::string dump_artifact(const json& j);

}  // namespace ietlab
