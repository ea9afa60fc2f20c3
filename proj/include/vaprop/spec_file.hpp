// Design-spec ingestion: a JSON document describing the SoC, its bus, its IP
// blocks and its security assets, normalized into prompt-ready views.
#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace vaprop {

using ojson = nlohmann::ordered_json;

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IpBlock {
  std::string name;
  std::string type;
  std::string operation;
  ojson extra;  // fields beyond NAME/TYPE/OPERATION, document order kept
};

struct Asset {
  std::string name;
  std::string type;
  std::string owner;  // declared IP name when present
  ojson extra;
};

struct SpecFile {
  std::string soc_name;
  std::string soc_type;
  std::string bus;
  int declared_ip_count = -1;  // NO_OF_IP when present
  std::string interface_name;
  int port_count = -1;
  std::vector<IpBlock> ips;
  std::vector<Asset> assets;
};

namespace detail {

inline std::string spec_str(const ojson& j, const char* key,
                            const std::string& path, bool required) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw SpecError("spec: missing field " + path + "." + key);
    return "";
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw SpecError("spec: field " + path + "." + key + " must be a string");
}

// counts arrive as "12" about as often as 12
inline int spec_count(const ojson& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return -1;
  if (it->is_number_integer()) return it->get<int>();
  if (it->is_string()) {
    try {
      std::size_t used = 0;
      int n = std::stoi(it->get<std::string>(), &used);
      if (used == it->get<std::string>().size() && n >= 0) return n;
    } catch (...) {
    }
  }
  throw SpecError("spec: field " + path + "." + key +
                  " is not a non-negative count");
}

inline ojson leftover_fields(const ojson& j,
                             std::initializer_list<const char*> consumed) {
  ojson extra = ojson::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool used = false;
    for (const char* c : consumed) used |= it.key() == c;
    if (!used) extra[it.key()] = it.value();
  }
  return extra;
}

inline Asset parse_asset(const ojson& j, const std::string& path) {
  if (!j.is_object()) throw SpecError("spec: " + path + " must be an object");
  Asset a;
  a.name = spec_str(j, "NAME", path, true);
  a.type = spec_str(j, "TYPE", path, false);
  a.owner = spec_str(j, "OWNER", path, false);
  a.extra = leftover_fields(j, {"NAME", "TYPE", "OWNER"});
  return a;
}

}  // namespace detail

// The document layout follows the SoC template: a SoC_General header, a bus
// interface block, IP_<n> blocks (or an IP_BLOCKS array) and an Assets block
// (object or array). Strict mode additionally enforces the declared IP count.
inline SpecFile ingest_spec(const ojson& j, bool strict = false) {
  if (!j.is_object()) throw SpecError("spec: document is not an object");
  SpecFile out;

  auto gen = j.find("SoC_General");
  if (gen != j.end()) {
    if (!gen->is_object())
      throw SpecError("spec: SoC_General must be an object");
    out.soc_name = detail::spec_str(*gen, "NAME", "SoC_General", false);
    out.soc_type = detail::spec_str(*gen, "TYPE", "SoC_General", false);
    out.bus = detail::spec_str(*gen, "BUS", "SoC_General", false);
    out.declared_ip_count = detail::spec_count(*gen, "NO_OF_IP", "SoC_General");
  }

  auto bus = j.find("BUS_INTERFACE");
  if (bus != j.end()) {
    if (!bus->is_object())
      throw SpecError("spec: BUS_INTERFACE must be an object");
    out.interface_name =
        detail::spec_str(*bus, "INTERFACE_NAME", "BUS_INTERFACE", false);
    out.port_count = detail::spec_count(*bus, "NO_OF_PORTS", "BUS_INTERFACE");
  }

  // IP_1, IP_2, ... in numeric order; IP_BLOCKS entries follow
  std::vector<std::pair<long, ojson::const_iterator>> numbered;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key.rfind("IP_", 0) != 0 || key == "IP_BLOCKS") continue;
    try {
      std::size_t used = 0;
      long n = std::stol(key.substr(3), &used);
      if (used != key.size() - 3) throw SpecError("spec: bad IP key " + key);
      numbered.emplace_back(n, it);
    } catch (const SpecError&) {
      throw;
    } catch (...) {
      throw SpecError("spec: bad IP key " + key);
    }
  }
  std::sort(numbered.begin(), numbered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto take_ip = [&](const ojson& block, const std::string& path) {
    if (!block.is_object())
      throw SpecError("spec: " + path + " must be an object");
    IpBlock ip;
    ip.name = detail::spec_str(block, "NAME", path, true);
    ip.type = detail::spec_str(block, "TYPE", path, false);
    ip.operation = detail::spec_str(block, "OPERATION", path, false);
    ip.extra = detail::leftover_fields(block, {"NAME", "TYPE", "OPERATION"});
    out.ips.push_back(std::move(ip));
  };
  for (const auto& [n, it] : numbered) take_ip(it.value(), it.key());
  auto blocks = j.find("IP_BLOCKS");
  if (blocks != j.end()) {
    if (!blocks->is_array())
      throw SpecError("spec: IP_BLOCKS must be an array");
    for (std::size_t i = 0; i < blocks->size(); ++i)
      take_ip((*blocks)[i], "IP_BLOCKS[" + std::to_string(i) + "]");
  }

  auto assets = j.find("Assets");
  if (assets != j.end()) {
    if (assets->is_array()) {
      for (std::size_t i = 0; i < assets->size(); ++i)
        out.assets.push_back(detail::parse_asset(
            (*assets)[i], "Assets[" + std::to_string(i) + "]"));
    } else {
      out.assets.push_back(detail::parse_asset(*assets, "Assets"));
    }
  }

  for (const Asset& a : out.assets) {
    if (a.owner.empty()) continue;
    bool known = std::any_of(out.ips.begin(), out.ips.end(),
                             [&](const IpBlock& ip) { return ip.name == a.owner; });
    if (!known)
      throw SpecError("spec: asset '" + a.name +
                      "' names undeclared IP '" + a.owner + "' as OWNER");
  }

  if (strict && out.declared_ip_count >= 0 &&
      out.declared_ip_count != static_cast<int>(out.ips.size()))
    throw SpecError("spec: SoC_General.NO_OF_IP declares " +
                    std::to_string(out.declared_ip_count) + " but " +
                    std::to_string(out.ips.size()) + " IP block(s) present");
  return out;
}

namespace detail {

inline void append_extra(std::string& text, const ojson& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    text += it.key();
    text += ": ";
    text += it->is_string() ? it->get<std::string>() : it->dump();
    text += "\n";
  }
}

}  // namespace detail

// Prompt-ready description of one IP in its SoC context.
inline std::string ip_view(const SpecFile& spec, const IpBlock& ip) {
  std::string text;
  text += "SoC: " + spec.soc_name + " (" + spec.soc_type + ", bus " +
          spec.bus + ")\n";
  text += "IP: " + ip.name + "\n";
  if (!ip.type.empty()) text += "TYPE: " + ip.type + "\n";
  if (!ip.operation.empty()) text += "OPERATION: " + ip.operation + "\n";
  detail::append_extra(text, ip.extra);
  return text;
}

// Everything the spec can contribute to the retrieval corpus.
inline std::vector<std::pair<std::string, std::string>> spec_corpus_documents(
    const SpecFile& spec) {
  std::vector<std::pair<std::string, std::string>> docs;
  std::string general = "SoC " + spec.soc_name + " type " + spec.soc_type +
                        " bus " + spec.bus + " interface " +
                        spec.interface_name + "\n";
  docs.emplace_back("soc-general", general);
  for (const IpBlock& ip : spec.ips) docs.emplace_back("ip:" + ip.name, ip_view(spec, ip));
  for (const Asset& a : spec.assets) {
    std::string text = "Asset: " + a.name + "\n";
    if (!a.type.empty()) text += "TYPE: " + a.type + "\n";
    if (!a.owner.empty()) text += "OWNER: " + a.owner + "\n";
    detail::append_extra(text, a.extra);
    docs.emplace_back("asset:" + a.name, text);
  }
  return docs;
}

// Signals guarded by an asset: an explicit SIGNALS list when given, else the
// asset's own name.
inline std::vector<std::string> asset_signals(const Asset& a) {
  auto it = a.extra.find("SIGNALS");
  if (it == a.extra.end() || !it->is_array()) return {a.name};
  std::vector<std::string> out;
  for (const auto& s : *it)
    if (s.is_string()) out.push_back(s.get<std::string>());
  return out;
}

}  // namespace vaprop
