// SPDX-License-Identifier: Apache-2.0
//
// mmsl - slot-level simulator for beamformed NR V2X sidelink at 60 GHz
// Copyright (C) 2026 The mmsl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "mmsl/sim_engine.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Experiment configuration: flat "key = value" files where a value may be a
// bracketed list "[a, b, c]" to sweep it. Command-line values override file
// values. A sweep is the Cartesian product of all listed values, each
// combination repeated `replications` times; run i gets seed = seed + i.

namespace mmsl::config
{

enum class ErrorKind
{
    Syntax,
    UnknownKey,
    BadValue,
    OutOfRange,
    MissingRequired,
    Inconsistent,
};

std::string to_string(ErrorKind k);

class ConfigError : public std::runtime_error
{
  public:
    ConfigError(ErrorKind kind, std::string key, const std::string& message);
    ErrorKind kind() const { return kind_; }
    const std::string& key() const { return key_; }

  private:
    ErrorKind kind_;
    std::string key_;
};

/// Ordered key -> raw values. Keys are normalised ('-' becomes '_').
class ParameterSet
{
  public:
    void set(std::string key, std::vector<std::string> values);
    const std::vector<std::string>* find(std::string_view key) const;
    const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

  private:
    std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
};

/// Every accepted key, in application order.
const std::vector<std::string>& known_keys();
std::string normalize_key(std::string_view key);

/// Splits "[a, b]" into {"a", "b"}; a plain value becomes a single item.
std::vector<std::string> split_values(std::string_view key, std::string_view raw);

ParameterSet parse_config_text(std::string_view text);
ParameterSet load_config_file(const std::filesystem::path& path);

/// b's entries replace a's; keys new in b are appended.
ParameterSet merge(const ParameterSet& a, const ParameterSet& b);

/// Expands a parameter set into validated run configurations.
std::vector<sim::SimConfig> expand(const ParameterSet& params);

/// Loads the optional file, applies the overrides and expands.
std::vector<sim::SimConfig> parse_config(const ParameterSet& overrides,
                                         const std::optional<std::filesystem::path>& config_file);

} // namespace mmsl::config
