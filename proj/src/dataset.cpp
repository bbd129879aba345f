#include "usyf/dataset.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>

#include "usyf/common.hpp"

namespace usyf {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
void write_le(std::FILE* f, T value) {
  // Build target is little-endian; write raw.
  if (std::fwrite(&value, sizeof(T), 1, f) != 1) throw IoError("dataset: write failed");
}

template <typename T>
T read_le(std::FILE* f) {
  T value{};
  if (std::fread(&value, sizeof(T), 1, f) != 1)
    throw FormatError("dataset: truncated file");
  return value;
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::string& path) {
  for (const auto& r : dataset.records) {
    require(r.pixels.size() == static_cast<size_t>(dataset.height) * dataset.width *
                                   dataset.channels,
            "write_dataset: record pixel count does not match header dims");
  }
  const std::string tmp = path + ".tmp";
  {
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw IoError("write_dataset: cannot open " + tmp);
    if (std::fwrite(kDatasetMagic, 1, 4, f.get()) != 4)
      throw IoError("dataset: write failed");
    write_le<uint32_t>(f.get(), kDatasetVersion);
    write_le<uint64_t>(f.get(), dataset.records.size());
    write_le<uint16_t>(f.get(), dataset.height);
    write_le<uint16_t>(f.get(), dataset.width);
    write_le<uint16_t>(f.get(), dataset.channels);
    for (const auto& r : dataset.records) {
      write_le<uint64_t>(f.get(), r.seed);
      if (!r.pixels.empty() &&
          std::fwrite(r.pixels.data(), 1, r.pixels.size(), f.get()) != r.pixels.size())
        throw IoError("dataset: write failed");
    }
    if (std::fflush(f.get()) != 0) throw IoError("dataset: flush failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("write_dataset: rename to " + path + " failed: " + ec.message());
}

Dataset read_dataset(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("read_dataset: cannot open " + path);

  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4) throw FormatError("dataset: truncated header");
  if (std::memcmp(magic, kDatasetMagic, 4) != 0)
    throw FormatError("dataset: bad magic in " + path);
  const auto version = read_le<uint32_t>(f.get());
  if (version != kDatasetVersion)
    throw FormatError("dataset: unsupported version " + std::to_string(version));

  Dataset out;
  const auto count = read_le<uint64_t>(f.get());
  out.height = read_le<uint16_t>(f.get());
  out.width = read_le<uint16_t>(f.get());
  out.channels = read_le<uint16_t>(f.get());
  const size_t record_bytes =
      static_cast<size_t>(out.height) * out.width * out.channels;
  out.records.resize(count);
  for (auto& r : out.records) {
    r.seed = read_le<uint64_t>(f.get());
    r.pixels.resize(record_bytes);
    if (std::fread(r.pixels.data(), 1, record_bytes, f.get()) != record_bytes)
      throw FormatError("dataset: truncated record payload");
  }
  return out;
}

}  // namespace usyf
