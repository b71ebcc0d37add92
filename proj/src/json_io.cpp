#include "ietlab/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ietlab {

namespace {

// Strict object access: every key must be consumed before done().
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParseError(where_ + ": expected an object");
  }
  const json& req(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw ParseError(where_ + ": missing field '" + key + "'");
    seen_.insert(key);
    return *it;
  }
  const json* opt(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ParseError(where_ + ": unknown field '" + it.key() + "'");
    }
  }
  std::string at(const std::string& key) const { return where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

long long int_from(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<long long>();
}

std::string string_from(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

bool bool_from(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ParseError(where + ": expected true or false");
  return j.get<bool>();
}

const json& array_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  return j;
}

void check_header(Fields& f, const std::string& kind, bool schema_required) {
  const json* s = schema_required ? &f.req("schema") : f.opt("schema");
  if (s && string_from(*s, f.at("schema")) != kSchema) {
    throw ParseError(f.at("schema") + ": unsupported schema '" + s->get<std::string>() + "'");
  }
  if (!kind.empty()) {
    const std::string k = string_from(f.req("kind"), f.at("kind"));
    if (k != kind) throw ParseError(f.at("kind") + ": expected '" + kind + "', got '" + k + "'");
  }
}

json header(const std::string& kind) { return json{{"schema", kSchema}, {"kind", kind}}; }

json label_to_json(const EndpointLabel& l) { return json::array({l.delta, l.steps}); }

EndpointLabel label_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [delta, steps]");
  const long long d = int_from(j[0], where);
  if (d < EndpointLabel::kBoundary || d > 1 << 20) throw ParseError(where + ": bad delta index");
  return {static_cast<int>(d), int_from(j[1], where)};
}

json labels_to_json(const std::vector<EndpointLabel>& ls) {
  json a = json::array();
  for (const auto& l : ls) a.push_back(label_to_json(l));
  return a;
}

std::vector<EndpointLabel> labels_from_json(const json& j, const std::string& where) {
  std::vector<EndpointLabel> out;
  for (const auto& e : array_from(j, where)) out.push_back(label_from_json(e, where));
  return out;
}

json class_to_json(const PairClass& pc) {
  json members = json::array();
  for (const auto& m : pc.members) {
    members.push_back({{"interval", to_json(m.interval)},
                       {"left_steps", m.left_steps},
                       {"right_steps", m.right_steps}});
  }
  return {{"delta_index", pc.delta_index},   {"delta_prime_index", pc.delta_prime_index},
          {"delta", to_json(pc.delta)},      {"delta_prime", to_json(pc.delta_prime)},
          {"members", members},              {"total_measure", to_json(pc.total_measure)},
          {"extended", pc.extended}};
}

PairClass class_from_json(const json& j, const std::string& where) {
  Fields f(j, where);
  PairClass pc{static_cast<int>(int_from(f.req("delta_index"), f.at("delta_index"))),
               static_cast<int>(int_from(f.req("delta_prime_index"), f.at("delta_prime_index"))),
               scalar_from_json(f.req("delta"), f.at("delta")),
               scalar_from_json(f.req("delta_prime"), f.at("delta_prime")),
               {},
               scalar_from_json(f.req("total_measure"), f.at("total_measure")),
               bool_from(f.req("extended"), f.at("extended"))};
  for (const auto& m : array_from(f.req("members"), f.at("members"))) {
    Fields g(m, f.at("members[]"));
    pc.members.push_back({interval_from_json(g.req("interval"), g.at("interval")),
                          int_from(g.req("left_steps"), g.at("left_steps")),
                          int_from(g.req("right_steps"), g.at("right_steps"))});
    g.done();
  }
  f.done();
  return pc;
}

}  // namespace

json to_json(const ExactScalar& x) { return x.str(); }

ExactScalar scalar_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return ExactScalar(j.get<long long>());
  if (!j.is_string()) throw ParseError(where + ": expected an exact scalar string");
  try {
    return ExactScalar::parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

json to_json(const Interval& i) { return json::array({to_json(i.lo()), to_json(i.hi())}); }

Interval interval_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [lo, hi]");
  try {
    return Interval(scalar_from_json(j[0], where), scalar_from_json(j[1], where));
  } catch (const PreconditionError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

json to_json(const IntervalSet& s) {
  json a = json::array();
  for (const auto& p : s.parts()) a.push_back(to_json(p));
  return a;
}

IntervalSet interval_set_from_json(const json& j, const std::string& where) {
  std::vector<Interval> parts;
  for (const auto& e : array_from(j, where)) parts.push_back(interval_from_json(e, where + "[]"));
  return IntervalSet(std::move(parts));
}

// ---- IET --------------------------------------------------------------------

json iet_to_json(const IET& t, const std::string& name) {
  json lengths = json::array();
  for (const auto& l : t.lengths()) lengths.push_back(to_json(l));
  json j{{"schema", kSchema}, {"lengths", lengths}, {"perm", t.perm()}, {"field_D", t.field()}};
  if (!name.empty()) j["name"] = name;
  return j;
}

IetDocument iet_from_json(const json& j) {
  Fields f(j, "iet");
  check_header(f, "", false);
  std::vector<ExactScalar> lengths;
  for (const auto& e : array_from(f.req("lengths"), f.at("lengths"))) {
    lengths.push_back(scalar_from_json(e, f.at("lengths[]")));
  }
  std::vector<int> perm;
  for (const auto& e : array_from(f.req("perm"), f.at("perm"))) {
    const long long v = int_from(e, f.at("perm[]"));
    if (v < 1 || v > 1 << 20) throw ParseError(f.at("perm") + ": entry out of range");
    perm.push_back(static_cast<int>(v));
  }
  const json* fd = f.opt("field_D");
  std::string name;
  if (const json* n = f.opt("name")) name = string_from(*n, f.at("name"));
  f.done();
  try {
    IET t(std::move(lengths), std::move(perm));
    if (fd && int_from(*fd, f.at("field_D")) != t.field()) {
      throw ParseError(f.at("field_D") + ": declared " + fd->dump() + " but data lies in field " +
                       std::to_string(t.field()));
    }
    return {std::move(t), std::move(name)};
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("iet: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("iet: ") + e.what());
  }
}

// ---- certificate ------------------------------------------------------------

json to_json(const RigidityCertificate& c) {
  json j = header("rigidity-certificate");
  j["iet"] = iet_to_json(c.iet);
  j["iet"].erase("schema");
  j["n"] = c.n;
  j["epsilon"] = to_json(c.epsilon);
  j["k"] = c.k;
  j["A"] = to_json(c.A);
  json pieces = json::array();
  for (const auto& p : c.pieces) {
    pieces.push_back({{"piece", to_json(p.piece)}, {"displacement", to_json(p.displacement)}});
  }
  j["pieces"] = pieces;
  j["branch"] = c.branch;
  j["minimality_depth"] = c.minimality_depth;
  j["details"] = c.details;
  return j;
}

RigidityCertificate certificate_from_json(const json& j) {
  Fields f(j, "certificate");
  check_header(f, "rigidity-certificate", true);
  IetDocument doc = iet_from_json(f.req("iet"));
  RigidityCertificate c{doc.iet,
                        int_from(f.req("n"), f.at("n")),
                        scalar_from_json(f.req("epsilon"), f.at("epsilon")),
                        int_from(f.req("k"), f.at("k")),
                        interval_set_from_json(f.req("A"), f.at("A")),
                        {},
                        string_from(f.req("branch"), f.at("branch")),
                        int_from(f.req("minimality_depth"), f.at("minimality_depth")),
                        {}};
  for (const auto& p : array_from(f.req("pieces"), f.at("pieces"))) {
    Fields g(p, f.at("pieces[]"));
    c.pieces.push_back({interval_from_json(g.req("piece"), g.at("piece")),
                        scalar_from_json(g.req("displacement"), g.at("displacement"))});
    g.done();
  }
  const json& det = f.req("details");
  if (!det.is_object()) throw ParseError(f.at("details") + ": expected an object");
  for (auto it = det.begin(); it != det.end(); ++it) {
    c.details[it.key()] = string_from(it.value(), f.at("details." + it.key()));
  }
  f.done();
  return c;
}

// ---- return map -------------------------------------------------------------

json to_json(const ReturnSystem& rs, const IntervalSet& uncovered) {
  json j = header("return-map");
  j["base"] = to_json(rs.base);
  json pieces = json::array();
  ExactScalar kac;
  for (const auto& p : rs.pieces) {
    pieces.push_back({{"piece", to_json(p.piece)},
                      {"return_time", p.return_time},
                      {"translation", to_json(p.translation)}});
    kac += ExactScalar(p.return_time) * p.piece.length();
  }
  j["pieces"] = pieces;
  j["uncovered"] = to_json(uncovered);
  j["complete"] = uncovered.empty();
  // sum of r_i |P_i| over the complete map equals the Kac return-time integral
  j["kac_sum"] = to_json(kac);
  json hist = json::array();
  for (const auto& [r, m] : return_time_histogram(rs)) hist.push_back({{"return_time", r}, {"measure", to_json(m)}});
  j["histogram"] = hist;
  if (uncovered.empty() && !rs.pieces.empty()) {
    j["induced"] = iet_to_json(rs.induced());
    j["induced"].erase("schema");
  }
  return j;
}

ReturnMapDocument return_map_from_json(const json& j) {
  Fields f(j, "return-map");
  check_header(f, "return-map", true);
  ReturnMapDocument doc{ReturnSystem{interval_from_json(f.req("base"), f.at("base")), {}},
                        interval_set_from_json(f.req("uncovered"), f.at("uncovered"))};
  ExactScalar kac;
  for (const auto& p : array_from(f.req("pieces"), f.at("pieces"))) {
    Fields g(p, f.at("pieces[]"));
    doc.system.pieces.push_back({interval_from_json(g.req("piece"), g.at("piece")),
                                 int_from(g.req("return_time"), g.at("return_time")),
                                 scalar_from_json(g.req("translation"), g.at("translation"))});
    g.done();
    kac += ExactScalar(doc.system.pieces.back().return_time) * doc.system.pieces.back().piece.length();
  }
  if (bool_from(f.req("complete"), f.at("complete")) != doc.uncovered.empty()) {
    throw ParseError(f.at("complete") + ": inconsistent with 'uncovered'");
  }
  if (!(scalar_from_json(f.req("kac_sum"), f.at("kac_sum")) == kac)) {
    throw ParseError(f.at("kac_sum") + ": inconsistent with pieces");
  }
  // derived fields: must agree with the pieces when present
  if (const json* h = f.opt("histogram")) {
    std::vector<std::pair<long long, ExactScalar>> hist;
    for (const auto& e : array_from(*h, f.at("histogram"))) {
      Fields g(e, f.at("histogram[]"));
      hist.emplace_back(int_from(g.req("return_time"), g.at("return_time")),
                        scalar_from_json(g.req("measure"), g.at("measure")));
      g.done();
    }
    if (hist != return_time_histogram(doc.system)) {
      throw ParseError(f.at("histogram") + ": inconsistent with pieces");
    }
  }
  if (const json* ind = f.opt("induced")) {
    if (!doc.uncovered.empty()) throw ParseError(f.at("induced") + ": present for an incomplete map");
    if (!(iet_from_json(*ind).iet == doc.system.induced())) {
      throw ParseError(f.at("induced") + ": inconsistent with pieces");
    }
  }
  f.done();
  return doc;
}

// ---- minimality -------------------------------------------------------------

namespace {
const char* status_name(IdocReport::Status s) {
  switch (s) {
    case IdocReport::Status::CertifiedToDepth: return "certified";
    case IdocReport::Status::NoDiscontinuities: return "no-discontinuities";
    case IdocReport::Status::Reducible: return "reducible";
    case IdocReport::Status::OrbitCollision: return "orbit-collision";
  }
  return "";
}
}  // namespace

json to_json(const IdocReport& r) {
  json j = header("minimality");
  j["status"] = status_name(r.status);
  j["depth"] = r.depth;
  j["verdict"] = r.describe();
  if (r.status == IdocReport::Status::OrbitCollision) {
    j["witness"] = {{"step", r.step}, {"delta", to_json(r.delta)}, {"delta_prime", to_json(r.delta_prime)}};
  }
  return j;
}

IdocReport idoc_from_json(const json& j) {
  Fields f(j, "minimality");
  check_header(f, "minimality", true);
  IdocReport r;
  const std::string s = string_from(f.req("status"), f.at("status"));
  bool known = false;
  for (auto st : {IdocReport::Status::CertifiedToDepth, IdocReport::Status::NoDiscontinuities,
                  IdocReport::Status::Reducible, IdocReport::Status::OrbitCollision}) {
    if (s == status_name(st)) {
      r.status = st;
      known = true;
    }
  }
  if (!known) throw ParseError(f.at("status") + ": unknown status '" + s + "'");
  r.depth = int_from(f.req("depth"), f.at("depth"));
  if (const json* w = f.opt("witness")) {
    Fields g(*w, f.at("witness"));
    r.step = int_from(g.req("step"), g.at("step"));
    r.delta = scalar_from_json(g.req("delta"), g.at("delta"));
    r.delta_prime = scalar_from_json(g.req("delta_prime"), g.at("delta_prime"));
    g.done();
  }
  if (string_from(f.req("verdict"), f.at("verdict")) != r.describe()) {
    throw ParseError(f.at("verdict") + ": inconsistent with status");
  }
  f.done();
  return r;
}

// ---- partition --------------------------------------------------------------

json to_json(const BackwardPartition& bp, const std::vector<PairClass>& classes) {
  json j = header("partition");
  j["n"] = bp.n;
  json points = json::array();
  for (std::size_t i = 0; i < bp.points.size(); ++i) {
    points.push_back({{"x", to_json(bp.points.points()[i])}, {"labels", labels_to_json(bp.provenance[i])}});
  }
  j["points"] = points;
  json elements = json::array();
  for (const auto& e : bp.elements) {
    elements.push_back({{"interval", to_json(e.interval)},
                        {"left", labels_to_json(e.left)},
                        {"right", labels_to_json(e.right)}});
  }
  j["elements"] = elements;
  json cls = json::array();
  for (const auto& pc : classes) cls.push_back(class_to_json(pc));
  j["classes"] = cls;
  return j;
}

PartitionDocument partition_from_json(const json& j) {
  Fields f(j, "partition");
  check_header(f, "partition", true);
  PartitionDocument doc;
  doc.partition.n = int_from(f.req("n"), f.at("n"));
  std::vector<ExactScalar> pts;
  for (const auto& p : array_from(f.req("points"), f.at("points"))) {
    Fields g(p, f.at("points[]"));
    pts.push_back(scalar_from_json(g.req("x"), g.at("x")));
    doc.partition.provenance.push_back(labels_from_json(g.req("labels"), g.at("labels")));
    g.done();
  }
  doc.partition.points = PointSet(pts);
  if (doc.partition.points.points() != pts) throw ParseError(f.at("points") + ": not strictly increasing");
  for (const auto& e : array_from(f.req("elements"), f.at("elements"))) {
    Fields g(e, f.at("elements[]"));
    doc.partition.elements.push_back({interval_from_json(g.req("interval"), g.at("interval")),
                                      labels_from_json(g.req("left"), g.at("left")),
                                      labels_from_json(g.req("right"), g.at("right"))});
    g.done();
  }
  for (const auto& c : array_from(f.req("classes"), f.at("classes"))) {
    doc.classes.push_back(class_from_json(c, f.at("classes[]")));
  }
  f.done();
  return doc;
}

// ---- mixing -----------------------------------------------------------------

json to_json(const MixingWindowResult& r, long long j, long long k, const ExactScalar& eps, int depth) {
  json out = header("mixing-window");
  out["j"] = j;
  out["k"] = k;
  out["epsilon"] = to_json(eps);
  out["depth"] = depth;
  out["pass"] = r.pass;
  out["pairs_checked"] = r.pairs_checked;
  if (r.witness) {
    const auto& w = *r.witness;
    out["witness"] = {{"n", w.n},
                      {"a", w.a.str()},
                      {"b", w.b.str()},
                      {"A", to_json(w.report.A)},
                      {"B", to_json(w.report.B)},
                      {"value", to_json(w.report.value)},
                      {"target", to_json(w.report.target)},
                      {"deviation", to_json(w.report.deviation)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json to_json(const BlockWitness& w) {
  json j = header("block-mixing");
  j["kappa"] = w.kappa;
  j["epsilon_threshold"] = to_json(w.epsilon_threshold);
  j["block"] = w.block;
  j["block_mass"] = to_json(w.block_mass);
  j["enlarged"] = to_json(w.enlarged);
  j["k"] = w.k;
  j["value"] = to_json(w.value);
  j["bound"] = to_json(w.bound);
  j["blocks_tried"] = w.blocks_tried;
  return j;
}

BlockWitness block_witness_from_json(const json& j) {
  Fields f(j, "block-mixing");
  check_header(f, "block-mixing", true);
  BlockWitness w{static_cast<int>(int_from(f.req("kappa"), f.at("kappa"))),
                 scalar_from_json(f.req("epsilon_threshold"), f.at("epsilon_threshold")),
                 int_from(f.req("block"), f.at("block")),
                 scalar_from_json(f.req("block_mass"), f.at("block_mass")),
                 interval_from_json(f.req("enlarged"), f.at("enlarged")),
                 int_from(f.req("k"), f.at("k")),
                 scalar_from_json(f.req("value"), f.at("value")),
                 scalar_from_json(f.req("bound"), f.at("bound")),
                 int_from(f.req("blocks_tried"), f.at("blocks_tried"))};
  f.done();
  return w;
}

json to_json(const VerificationReport& r) {
  json j = header("verification");
  j["ok"] = r.ok;
  j["failures"] = r.failures;
  j["pieces_checked"] = r.pieces_checked;
  j["samples_checked"] = r.samples_checked;
  return j;
}

// ---- text -------------------------------------------------------------------

json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump_artifact(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ietlab
