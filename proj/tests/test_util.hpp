// Copyright 2026 The Chewtex Authors. All Rights Reserved.
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

#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "chewtex/error.hpp"

#define EXPECT_ERROR_KIND(statement, expected_kind)                                  \
  do {                                                                               \
    try {                                                                            \
      (void)(statement);                                                             \
      ADD_FAILURE() << "expected chewtex::Error from " #statement;                  \
    } catch (const ::chewtex::Error& err__) {                                        \
      EXPECT_EQ(err__.kind(), expected_kind) << err__.what();                        \
    }                                                                                \
  } while (0)

namespace chewtex::test {

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("chewtex-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace chewtex::test
