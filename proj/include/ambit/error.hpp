// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The ambit-channel Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ambit
{

// Base class for every error raised by the toolkit.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A physical or numerical parameter lies outside its admissible domain.
class parameter_error : public error
{
public:
    using error::error;
};

// An experiment configuration is invalid. `field()` names the offending key.
class config_error : public error
{
public:
    config_error(std::string field, const std::string &what)
        : error(field + ": " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

// A path delay does not fit the configured delay axis.
class delay_overflow_error : public error
{
public:
    delay_overflow_error(std::size_t time_step, std::size_t bin, std::size_t bin_count)
        : error("delay overflow at time step " + std::to_string(time_step) + ": bin " +
                std::to_string(bin) + " >= " + std::to_string(bin_count) +
                " (increase tau_max_s)"),
          time_step_(time_step) {}

    std::size_t time_step() const noexcept { return time_step_; }

private:
    std::size_t time_step_;
};

// The mobile user leaves the span covered by the simulation grid.
class horizon_error : public error
{
public:
    using error::error;
};

// Shapes or indices passed between stages disagree.
class contract_error : public error
{
public:
    using error::error;
};

} // namespace ambit
