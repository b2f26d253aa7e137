#include "inkjet/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "inkjet/imageio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace inkjet {

std::string to_string(Split s) { return s == Split::Train ? "train" : "val"; }

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  throw std::invalid_argument("manifest: split must be 'train' or 'val', got '" + s + "'");
}

std::vector<const ManifestEntry*> Manifest::split_entries(Split s) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.split == s) out.push_back(&e);
  return out;
}

std::vector<std::string> Manifest::train_models() const {
  std::set<std::string> models;
  for (const auto& e : entries)
    if (e.split == Split::Train) models.insert(e.printer_model);
  return {models.begin(), models.end()};
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);

  Manifest m;
  m.base_dir = fs::path(path).parent_path().string();

  std::set<std::string> seen_ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("manifest: " + path + ":" + std::to_string(lineno) +
                               ": not valid JSON: " + e.what());
    }
    auto require = [&](const char* key) -> std::string {
      if (!j.contains(key) || !j[key].is_string())
        throw std::runtime_error("manifest: " + path + ":" + std::to_string(lineno) +
                                 ": missing string field '" + key + "'");
      return j[key].get<std::string>();
    };
    ManifestEntry e;
    e.path = require("path");
    e.printer_model = require("printer_model");
    e.manufacturer = require("manufacturer");
    e.scan_id = require("scan_id");
    e.split = split_from_string(require("split"));
    if (j.contains("dpi")) e.dpi = j["dpi"].get<double>();

    if (!seen_ids.insert(e.scan_id).second)
      throw std::runtime_error("manifest: " + path + ":" + std::to_string(lineno) +
                               ": duplicate scan_id '" + e.scan_id + "'");
    fs::path resolved = fs::path(e.path).is_absolute()
                            ? fs::path(e.path)
                            : fs::path(m.base_dir) / e.path;
    std::ifstream probe(resolved);
    if (!probe)
      throw std::runtime_error("manifest: " + path + ":" + std::to_string(lineno) +
                               ": unreadable image file '" + resolved.string() + "'");
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty())
    throw std::runtime_error("manifest: " + path + ": no entries");

  // every val class must also appear in train
  std::set<std::string> train_classes;
  for (const auto& e : m.entries)
    if (e.split == Split::Train) train_classes.insert(e.printer_model);
  for (const auto& e : m.entries)
    if (e.split == Split::Val && !train_classes.count(e.printer_model))
      throw std::runtime_error("manifest: class '" + e.printer_model +
                               "' (scan '" + e.scan_id +
                               "') appears in val but not in train");
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("manifest: cannot write " + path);
  for (const auto& e : m.entries) {
    json j{{"path", e.path},
           {"printer_model", e.printer_model},
           {"manufacturer", e.manufacturer},
           {"scan_id", e.scan_id},
           {"split", to_string(e.split)}};
    if (e.dpi != 2400.0) j["dpi"] = e.dpi;
    out << j.dump() << "\n";
  }
}

ScanDocument load_scan(const ManifestEntry& entry, const std::string& base_dir) {
  fs::path resolved = fs::path(entry.path).is_absolute()
                          ? fs::path(entry.path)
                          : fs::path(base_dir) / entry.path;
  ScanDocument doc;
  doc.image = read_image(resolved.string());
  doc.dpi = entry.dpi;
  doc.printer_model = entry.printer_model;
  doc.manufacturer = entry.manufacturer;
  doc.scan_id = entry.scan_id;
  doc.split = entry.split;
  if (entry.dpi != 2400.0)
    std::cerr << "warning: scan '" << entry.scan_id << "' has dpi " << entry.dpi
              << " (pipeline assumes 2400, no rescaling is applied)\n";
  return doc;
}

}  // namespace inkjet
