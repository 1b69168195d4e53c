#include "spfrcs/netmodel.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace spfrcs {

namespace {

std::string join_lines(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

const Link* Topology::find_link(int id) const {
  for (const Link& link : links) {
    if (link.id == id) return &link;
  }
  return nullptr;
}

const Flow* Instance::find_flow(int id) const {
  for (const Flow& flow : flows) {
    if (flow.id == id) return &flow;
  }
  return nullptr;
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error("invalid instance: " + join_lines(violations)),
      violations_(std::move(violations)) {}

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> out;
  const Topology& topo = instance.topology;

  std::unordered_set<std::string> nodes;
  for (const std::string& n : topo.nodes) {
    if (!nodes.insert(n).second)
      out.push_back("duplicate node " + n);
  }

  std::unordered_map<int, const Link*> links;
  std::unordered_set<std::string> pairs;
  for (const Link& link : topo.links) {
    const std::string tag = "link " + std::to_string(link.id);
    if (!links.emplace(link.id, &link).second)
      out.push_back("duplicate " + tag);
    if (!nodes.count(link.src))
      out.push_back(tag + ": unknown src node " + link.src);
    if (!nodes.count(link.dst))
      out.push_back(tag + ": unknown dst node " + link.dst);
    if (!pairs.insert(link.src + "\x1f" + link.dst).second)
      out.push_back(tag + ": duplicate directed pair " + link.src + "->" +
                    link.dst);
    if (!(link.capacity > 0))
      out.push_back(tag + ": nonpositive capacity");
    else if (link.capacity > kMaxCapacity)
      out.push_back(tag + ": capacity exceeds " +
                    std::to_string(kMaxCapacity) + " units");
  }

  std::unordered_set<int> flow_ids;
  for (const Flow& flow : instance.flows) {
    const std::string tag = "flow " + std::to_string(flow.id);
    if (!flow_ids.insert(flow.id).second)
      out.push_back("duplicate " + tag);
    if (flow.path.empty())
      out.push_back(tag + ": empty path");
    const Link* prev = nullptr;
    std::unordered_set<int> seen;
    for (int link_id : flow.path) {
      auto it = links.find(link_id);
      if (it == links.end()) {
        out.push_back("unknown link " + std::to_string(link_id) + " in " +
                      tag);
        prev = nullptr;
        continue;
      }
      if (!seen.insert(link_id).second)
        out.push_back(tag + ": repeated link " + std::to_string(link_id));
      if (prev && prev->dst != it->second->src)
        out.push_back(tag + ": path breaks at link " +
                      std::to_string(link_id));
      prev = it->second;
    }
    if (!(flow.demand > 0))
      out.push_back(tag + ": nonpositive demand");
    if (!(flow.priority > 0))
      out.push_back(tag + ": nonpositive priority");
  }
  return out;
}

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ParseError("unknown field \"" + key + "\" in " + where);
  }
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError("missing field \"" + std::string(key) + "\" in " + where);
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError("bad field \"" + std::string(key) + "\" in " + where +
                     ": " + e.what());
  }
}

}  // namespace

Instance load_instance(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError("parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("top-level value must be an object");
  reject_unknown(doc, {"nodes", "links", "flows"}, "instance");

  Instance instance;
  for (const auto& n : required<json>(doc, "nodes", "instance")) {
    if (!n.is_string()) throw ParseError("node ids must be strings");
    instance.topology.nodes.push_back(n.get<std::string>());
  }
  for (const auto& l : required<json>(doc, "links", "instance")) {
    if (!l.is_object()) throw ParseError("links must be objects");
    Link link;
    link.id = required<int>(l, "id", "link");
    const std::string where = "link " + std::to_string(link.id);
    reject_unknown(l, {"id", "src", "dst", "capacity"}, where);
    link.src = required<std::string>(l, "src", where);
    link.dst = required<std::string>(l, "dst", where);
    link.capacity = required<double>(l, "capacity", where);
    instance.topology.links.push_back(std::move(link));
  }
  for (const auto& f : required<json>(doc, "flows", "instance")) {
    if (!f.is_object()) throw ParseError("flows must be objects");
    Flow flow;
    flow.id = required<int>(f, "id", "flow");
    const std::string where = "flow " + std::to_string(flow.id);
    reject_unknown(f, {"id", "path", "demand", "priority"}, where);
    flow.path = required<std::vector<int>>(f, "path", where);
    flow.demand = required<double>(f, "demand", where);
    if (f.contains("priority"))
      flow.priority = required<double>(f, "priority", where);
    instance.flows.push_back(std::move(flow));
  }

  auto violations = validate_instance(instance);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return instance;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_instance(buf.str());
}

std::string serialize(const Instance& instance) {
  ordered_json doc;
  doc["nodes"] = instance.topology.nodes;
  doc["links"] = ordered_json::array();
  for (const Link& link : instance.topology.links) {
    ordered_json l;
    l["id"] = link.id;
    l["src"] = link.src;
    l["dst"] = link.dst;
    l["capacity"] = link.capacity;
    doc["links"].push_back(std::move(l));
  }
  doc["flows"] = ordered_json::array();
  for (const Flow& flow : instance.flows) {
    ordered_json f;
    f["id"] = flow.id;
    f["path"] = flow.path;
    f["demand"] = flow.demand;
    f["priority"] = flow.priority;
    doc["flows"].push_back(std::move(f));
  }
  return doc.dump(2) + "\n";
}

std::set<int> flows_on_link(const Instance& instance, int link_id) {
  if (!instance.topology.find_link(link_id))
    throw std::invalid_argument("unknown link " + std::to_string(link_id));
  std::set<int> out;
  for (const Flow& flow : instance.flows) {
    for (int id : flow.path) {
      if (id == link_id) {
        out.insert(flow.id);
        break;
      }
    }
  }
  return out;
}

namespace {

// Pulls attr="value" out of an XML tag body.
std::string xml_attr(const std::string& tag, const std::string& attr) {
  const std::string needle = attr + "=\"";
  auto pos = tag.find(needle);
  if (pos == std::string::npos) return {};
  pos += needle.size();
  auto end = tag.find('"', pos);
  if (end == std::string::npos) return {};
  return tag.substr(pos, end - pos);
}

}  // namespace

Topology import_graphml(const std::string& text, double default_capacity) {
  Topology topo;
  std::size_t pos = 0;
  int next_link = 0;
  std::set<std::string> nodes;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    auto end = text.find('>', pos);
    if (end == std::string::npos) break;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.rfind("node", 0) == 0) {
      std::string id = xml_attr(tag, "id");
      if (!id.empty() && nodes.insert(id).second) topo.nodes.push_back(id);
    } else if (tag.rfind("edge", 0) == 0) {
      std::string src = xml_attr(tag, "source");
      std::string dst = xml_attr(tag, "target");
      if (src.empty() || dst.empty())
        throw ParseError("edge without source/target in graphml");
      topo.links.push_back({next_link++, src, dst, default_capacity});
      topo.links.push_back({next_link++, dst, src, default_capacity});
    }
  }
  if (topo.nodes.empty()) throw ParseError("no nodes found in graphml");
  return topo;
}

}  // namespace spfrcs
