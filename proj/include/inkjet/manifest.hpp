#pragma once

#include <string>
#include <vector>

#include "inkjet/image.hpp"

namespace inkjet {

enum class Split { Train, Val };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct ManifestEntry {
  std::string path;  // resolved relative to the manifest file's directory
  std::string printer_model;
  std::string manufacturer;
  std::string scan_id;
  Split split = Split::Train;
  double dpi = 2400.0;  // optional in the file, defaults to the scan protocol
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string base_dir;

  std::vector<const ManifestEntry*> split_entries(Split s) const;
  std::vector<std::string> train_models() const;  // sorted unique
};

// High-resolution scan plus provenance. `split` is carried per scan so crops
// from one scan can never straddle the train/val boundary.
struct ScanDocument {
  RgbImage image;
  double dpi = 2400.0;
  std::string printer_model;
  std::string manufacturer;
  std::string scan_id;
  Split split = Split::Train;
};

// Parses a JSON-lines manifest (one object per line: path, printer_model,
// manufacturer, scan_id, split, optional dpi). Rejects duplicate scan_ids,
// unreadable paths and val-only classes, naming the offending entry.
Manifest load_manifest(const std::string& path);

void save_manifest(const Manifest& m, const std::string& path);

// Reads the entry's image (PNG/TIFF via imageio) and attaches metadata.
// Warns on stderr when dpi != 2400 (the pipeline never rescales).
ScanDocument load_scan(const ManifestEntry& entry, const std::string& base_dir);

}  // namespace inkjet
