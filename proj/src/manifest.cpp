// SPDX-License-Identifier: Apache-2.0
#include "gzsl/manifest.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"

namespace gzsl {

std::string to_string(SampleDomain d) {
  return d == SampleDomain::illustration ? "illustration" : "photo";
}

SampleDomain sample_domain_from_string(const std::string& s) {
  if (s == "illustration") return SampleDomain::illustration;
  if (s == "photo") return SampleDomain::photo;
  throw InvalidRecord("unknown domain '" + s + "'");
}

Manifest Manifest::parse(const std::string& text,
                         const ManifestOptions& options) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidRecord("empty manifest");
  }
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "path" || header[1] != "class_id" ||
      header[2] != "domain") {
    throw MissingColumn("manifest header must be path,class_id,domain[,split]");
  }
  const bool has_split = header.size() >= 4 && header[3] == "split";

  Manifest m;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < 3) {
      throw InvalidRecord("manifest line " + std::to_string(lineno) +
                          " has too few fields");
    }
    ManifestRecord r;
    r.path = fields[0];
    r.class_id = fields[1];
    r.domain = sample_domain_from_string(fields[2]);
    if (has_split && fields.size() >= 4 && !fields[3].empty()) {
      r.split_tag = fields[3];
    }
    if (r.path.empty() || r.class_id.empty()) {
      throw InvalidRecord("manifest line " + std::to_string(lineno) +
                          " has an empty path or class id");
    }
    if (options.check_paths) {
      const auto resolved = options.base_dir.empty()
                                ? std::filesystem::path(r.path)
                                : options.base_dir / r.path;
      if (!std::filesystem::exists(resolved)) {
        throw MissingFile("manifest references missing file: " +
                          resolved.string());
      }
    }
    m.records.push_back(std::move(r));
  }
  if (m.records.empty()) {
    throw InvalidRecord("manifest has no records");
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& path,
                        const ManifestOptions& options) {
  ManifestOptions resolved = options;
  if (resolved.base_dir.empty() && path.has_parent_path()) {
    resolved.base_dir = path.parent_path();
  }
  return parse(read_text_file(path), resolved);
}

std::string Manifest::to_csv() const {
  std::ostringstream out;
  out << "path,class_id,domain,split\n";
  for (const auto& r : records) {
    out << r.path << ',' << r.class_id << ',' << to_string(r.domain) << ','
        << r.split_tag << '\n';
  }
  return out.str();
}

void Manifest::save(const std::filesystem::path& path) const {
  write_text_file(path, to_csv());
}

std::vector<std::string> Manifest::class_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : records) {
    ids.push_back(r.class_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void Manifest::validate_classes(const std::vector<std::string>& registry) const {
  const std::unordered_set<std::string> known(registry.begin(), registry.end());
  for (const auto& r : records) {
    if (!known.contains(r.class_id)) {
      throw UnknownClass("manifest references unregistered class '" +
                         r.class_id + "'");
    }
  }
}

void Manifest::validate_zsl(const Split& split) const {
  std::unordered_set<std::string> illustrated;
  for (const auto& r : records) {
    if (r.domain == SampleDomain::illustration) {
      illustrated.insert(r.class_id);
    } else if (r.split_tag == "train" && !split.is_seen(r.class_id)) {
      // A photo of an unseen class in training silently breaks the zero-shot
      // premise, so this is a hard error.
      throw UnseenPhotoLeak("training photo of unseen class '" + r.class_id +
                            "': " + r.path);
    }
  }
  for (const auto& c : split.seen) {
    if (!illustrated.contains(c)) {
      throw EmptyClass("class '" + c + "' has no illustrations");
    }
  }
  for (const auto& hop : split.hops) {
    for (const auto& c : hop) {
      if (!illustrated.contains(c)) {
        throw EmptyClass("class '" + c + "' has no illustrations");
      }
    }
  }
}

Eigen::VectorXd load_feature_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<double> values;
  std::string token;
  for (const char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      if (!token.empty()) {
        values.push_back(parse_double(token));
        token.clear();
      }
    } else {
      token.push_back(ch);
    }
  }
  if (!token.empty()) {
    values.push_back(parse_double(token));
  }
  if (values.empty()) {
    throw InvalidRecord("feature file is empty: " + path.string());
  }
  return Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
}

void save_feature_file(const std::filesystem::path& path,
                       const Eigen::VectorXd& v) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out << ' ';
    }
    out << format_double(v[i]);
  }
  out << '\n';
  write_text_file(path, out.str());
}

LoadedSamples load_manifest_features(const Manifest& manifest,
                                     const std::vector<std::string>& classes,
                                     const ManifestSelection& select,
                                     const std::filesystem::path& base_dir) {
  std::unordered_map<std::string, int> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    class_index.emplace(classes[i], static_cast<int>(i));
  }

  std::vector<const ManifestRecord*> chosen;
  for (const auto& r : manifest.records) {
    if (select.domain && r.domain != *select.domain) {
      continue;
    }
    if (select.split_tag && r.split_tag != *select.split_tag) {
      continue;
    }
    chosen.push_back(&r);
  }

  LoadedSamples out;
  Eigen::Index dim = -1;
  out.data.x.resize(static_cast<Eigen::Index>(chosen.size()), 0);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const auto& r = *chosen[i];
    const auto it = class_index.find(r.class_id);
    if (it == class_index.end()) {
      throw UnknownClass("manifest references unregistered class '" +
                         r.class_id + "'");
    }
    const auto path = base_dir.empty() ? std::filesystem::path(r.path)
                                       : base_dir / r.path;
    const Eigen::VectorXd v = load_feature_file(path);
    if (dim < 0) {
      dim = v.size();
      out.data.x.resize(static_cast<Eigen::Index>(chosen.size()), dim);
    } else if (v.size() != dim) {
      throw DimensionMismatch("feature file " + path.string() + " has dim " +
                              std::to_string(v.size()) + ", expected " +
                              std::to_string(dim));
    }
    out.data.x.row(static_cast<Eigen::Index>(i)) = v.transpose();
    out.data.labels.push_back(it->second);
    out.sample_ids.push_back(r.path);
  }
  return out;
}

}  // namespace gzsl
