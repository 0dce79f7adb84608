// Copyright 2026 The acbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian binary readers/writers shared by the on-disk formats.

#ifndef ACBENCH_CORE_SRC_BINIO_HPP_
#define ACBENCH_CORE_SRC_BINIO_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "acb/error.hpp"

namespace acb::binio {

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
  }

  void bytes(const void* p, size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write failed: " + path_);
  }
  void u16(uint16_t v) { put_le(v); }
  void u32(uint32_t v) { put_le(v); }
  void u64(uint64_t v) { put_le(v); }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_le(bits);
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_le(bits);
  }
  void close() {
    out_.close();
    if (!out_) throw IoError("close failed: " + path_);
  }

 private:
  template <typename T>
  void put_le(T v) {
    unsigned char buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    bytes(buf, sizeof(T));
  }

  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open for reading: " + path);
  }

  void bytes(void* p, size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw IoError("truncated file: " + path_);
    }
  }
  uint16_t u16() { return get_le<uint16_t>(); }
  uint32_t u32() { return get_le<uint32_t>(); }
  uint64_t u64() { return get_le<uint64_t>(); }
  float f32() {
    uint32_t bits = get_le<uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    uint64_t bits = get_le<uint64_t>();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }
  const std::string& path() const { return path_; }

 private:
  template <typename T>
  T get_le() {
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  std::string path_;
  std::ifstream in_;
};

}  // namespace acb::binio

#endif  // ACBENCH_CORE_SRC_BINIO_HPP_
