// SPDX-License-Identifier: Apache-2.0
#include "gzsl/descriptors.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "gzsl/errors.hpp"
#include "gzsl/io_util.hpp"
#include "gzsl/linalg.hpp"

namespace gzsl {

namespace {
constexpr char kBinaryMagic[8] = {'G', 'Z', 'S', 'L', 'D', 'E', 'S', 'C'};
constexpr std::uint32_t kBinaryVersion = 1;

void check_consistent(const std::vector<ClassDescriptor>& descriptors) {
  if (descriptors.empty()) {
    throw EmptyClassList("no descriptors to export");
  }
  const auto dim = descriptors.front().phi.size();
  for (const auto& d : descriptors) {
    if (d.phi.size() != dim) {
      throw DimensionMismatch("descriptor '" + d.class_id + "' has dim " +
                              std::to_string(d.phi.size()) + ", expected " +
                              std::to_string(dim));
    }
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t& off) {
  if (off + 4 > s.size()) {
    throw InvalidRecord("binary descriptor file truncated");
  }
  const auto b = reinterpret_cast<const unsigned char*>(s.data() + off);
  off += 4;
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace

std::vector<ClassDescriptor> class_descriptors(
    const EncoderContract& encoder,
    const std::map<std::string, std::vector<Eigen::VectorXd>>& samples_by_class) {
  if (samples_by_class.empty()) {
    throw EmptyClassList("no classes supplied");
  }
  std::vector<ClassDescriptor> out;
  out.reserve(samples_by_class.size());
  for (const auto& [class_id, samples] : samples_by_class) {
    if (samples.empty()) {
      throw EmptyClass("class '" + class_id + "' has no side-information samples");
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(encoder.output_dim());
    for (const auto& s : samples) {
      sum += encoder.forward(s);
    }
    out.push_back({class_id, l2_normalize(sum)});
  }
  return out;
}

std::vector<ClassDescriptor> class_descriptors(const EncoderContract& encoder,
                                               const LabeledVectors& data) {
  std::map<std::string, std::vector<Eigen::VectorXd>> grouped;
  for (const auto& c : data.classes) {
    grouped[c];  // every registered class must end up non-empty
  }
  for (Eigen::Index i = 0; i < data.data.size(); ++i) {
    grouped[data.classes.at(static_cast<std::size_t>(data.data.labels[i]))]
        .push_back(data.data.x.row(i).transpose());
  }
  return class_descriptors(encoder, grouped);
}

void export_descriptors_text(const std::vector<ClassDescriptor>& descriptors,
                             const std::filesystem::path& path) {
  check_consistent(descriptors);
  std::ostringstream out;
  out << "class_id,dim\n";
  for (const auto& d : descriptors) {
    out << d.class_id;
    for (Eigen::Index i = 0; i < d.phi.size(); ++i) {
      out << ',' << format_double(d.phi[i]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<ClassDescriptor> import_descriptors_text(
    const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "class_id,dim") {
    throw InvalidRecord("descriptor file missing 'class_id,dim' header: " +
                        path.string());
  }
  std::vector<ClassDescriptor> out;
  Eigen::Index dim = -1;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < 2) {
      throw InvalidRecord("descriptor record has no values: " + line);
    }
    ClassDescriptor d;
    d.class_id = fields[0];
    d.phi.resize(static_cast<Eigen::Index>(fields.size()) - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      d.phi[static_cast<Eigen::Index>(i - 1)] = parse_double(fields[i]);
    }
    if (dim < 0) {
      dim = d.phi.size();
    } else if (d.phi.size() != dim) {
      throw DimensionMismatch("descriptor '" + d.class_id + "' has dim " +
                              std::to_string(d.phi.size()) + ", expected " +
                              std::to_string(dim));
    }
    out.push_back(std::move(d));
  }
  if (out.empty()) {
    throw EmptyClassList("descriptor file has no records: " + path.string());
  }
  return out;
}

void export_descriptors_binary(const std::vector<ClassDescriptor>& descriptors,
                               const std::filesystem::path& path) {
  check_consistent(descriptors);
  std::string buf;
  buf.append(kBinaryMagic, sizeof(kBinaryMagic));
  put_u32(buf, kBinaryVersion);
  put_u32(buf, static_cast<std::uint32_t>(descriptors.size()));
  put_u32(buf, static_cast<std::uint32_t>(descriptors.front().phi.size()));
  for (const auto& d : descriptors) {
    put_u32(buf, static_cast<std::uint32_t>(d.class_id.size()));
    buf.append(d.class_id);
    for (Eigen::Index i = 0; i < d.phi.size(); ++i) {
      const float f = static_cast<float>(d.phi[i]);
      std::uint32_t bits = 0;
      std::memcpy(&bits, &f, sizeof(bits));
      put_u32(buf, bits);
    }
  }
  write_text_file(path, buf);
}

std::vector<ClassDescriptor> import_descriptors_binary(
    const std::filesystem::path& path) {
  const std::string buf = read_text_file(path);
  if (buf.size() < sizeof(kBinaryMagic) ||
      std::memcmp(buf.data(), kBinaryMagic, sizeof(kBinaryMagic)) != 0) {
    throw InvalidRecord("not a binary descriptor file: " + path.string());
  }
  std::size_t off = sizeof(kBinaryMagic);
  const auto version = get_u32(buf, off);
  if (version != kBinaryVersion) {
    throw InvalidRecord("unsupported descriptor file version " +
                        std::to_string(version));
  }
  const auto count = get_u32(buf, off);
  const auto dim = get_u32(buf, off);
  std::vector<ClassDescriptor> out;
  out.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    const auto id_len = get_u32(buf, off);
    if (off + id_len > buf.size()) {
      throw InvalidRecord("binary descriptor file truncated");
    }
    ClassDescriptor d;
    d.class_id.assign(buf, off, id_len);
    off += id_len;
    d.phi.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
      const auto bits = get_u32(buf, off);
      float f = 0.0f;
      std::memcpy(&f, &bits, sizeof(f));
      d.phi[i] = static_cast<double>(f);
    }
    out.push_back(std::move(d));
  }
  if (out.empty()) {
    throw EmptyClassList("binary descriptor file has no records");
  }
  return out;
}

}  // namespace gzsl
