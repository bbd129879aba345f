#include "usyf/checkpoint.hpp"

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
void put(std::FILE* f, T value) {
  if (std::fwrite(&value, sizeof(T), 1, f) != 1)
    throw IoError("checkpoint: write failed");
}

template <typename T>
T get(std::FILE* f) {
  T value{};
  if (std::fread(&value, sizeof(T), 1, f) != 1)
    throw FormatError("checkpoint: truncated file");
  return value;
}

void put_string(std::FILE* f, const std::string& s) {
  put<uint64_t>(f, s.size());
  if (!s.empty() && std::fwrite(s.data(), 1, s.size(), f) != s.size())
    throw IoError("checkpoint: write failed");
}

std::string get_string(std::FILE* f) {
  const auto len = get<uint64_t>(f);
  std::string s(len, '\0');
  if (len > 0 && std::fread(s.data(), 1, len, f) != len)
    throw FormatError("checkpoint: truncated string");
  return s;
}

}  // namespace

void save_checkpoint(const CheckpointData& data, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw IoError("save_checkpoint: cannot open " + tmp);
    if (std::fwrite(kCheckpointMagic, 1, 4, f.get()) != 4)
      throw IoError("checkpoint: write failed");
    put<uint32_t>(f.get(), kCheckpointVersion);
    put<uint64_t>(f.get(), data.config_hash);
    put_string(f.get(), data.config_text);
    put<int32_t>(f.get(), data.next_epoch);
    put<uint64_t>(f.get(), data.queue_cursor);
    put<uint64_t>(f.get(), data.queue_size);
    put<double>(f.get(), data.plateau.lr);
    put<double>(f.get(), data.plateau.best_accuracy);
    put<int32_t>(f.get(), data.plateau.since_improve_reduce);
    put<int32_t>(f.get(), data.plateau.since_improve_stop);
    put<uint64_t>(f.get(), data.tensors.size());
    for (const auto& [name, values] : data.tensors) {
      put_string(f.get(), name);
      put<uint64_t>(f.get(), values.size());
      if (!values.empty() &&
          std::fwrite(values.data(), sizeof(float), values.size(), f.get()) !=
              values.size())
        throw IoError("checkpoint: write failed");
    }
    if (std::fflush(f.get()) != 0) throw IoError("checkpoint: flush failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("save_checkpoint: rename to " + path + " failed: " + ec.message());
}

CheckpointData load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("load_checkpoint: cannot open " + path);

  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4)
    throw FormatError("checkpoint: truncated header");
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw FormatError("checkpoint: bad magic in " + path);
  const auto version = get<uint32_t>(f.get());
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));

  CheckpointData data;
  data.config_hash = get<uint64_t>(f.get());
  data.config_text = get_string(f.get());
  data.next_epoch = get<int32_t>(f.get());
  data.queue_cursor = get<uint64_t>(f.get());
  data.queue_size = get<uint64_t>(f.get());
  data.plateau.lr = get<double>(f.get());
  data.plateau.best_accuracy = get<double>(f.get());
  data.plateau.since_improve_reduce = get<int32_t>(f.get());
  data.plateau.since_improve_stop = get<int32_t>(f.get());
  const auto tensor_count = get<uint64_t>(f.get());
  data.tensors.resize(tensor_count);
  for (auto& [name, values] : data.tensors) {
    name = get_string(f.get());
    const auto size = get<uint64_t>(f.get());
    values.resize(size);
    if (size > 0 &&
        std::fread(values.data(), sizeof(float), size, f.get()) != size)
      throw FormatError("checkpoint: truncated tensor payload");
  }
  return data;
}

}  // namespace usyf
