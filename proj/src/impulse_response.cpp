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
#include "ambit/impulse_response.hpp"

#include "ambit/error.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "csv_format.hpp"

namespace ambit
{
namespace
{

std::uint64_t to_little_endian(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big)
    {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i)
            r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
        return r;
    }
    return v;
}

void put_f64(std::ostream &os, double v)
{
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    os.write(bytes, 8);
}

double get_f64(std::istream &is)
{
    char bytes[8];
    if (!is.read(bytes, 8))
        throw contract_error("binary grid truncated");
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    return std::bit_cast<double>(to_little_endian(bits));
}

} // namespace

std::vector<double> received_power_trace(const ImpulseResponseGrid &h)
{
    std::vector<double> power(static_cast<std::size_t>(h.steps()), 0.0);
    for (std::int64_t k = 0; k < h.steps(); ++k)
    {
        double sum = 0.0;
        for (std::int64_t b = 0; b < h.bins(); ++b)
            sum += h.response == Response::impulse ? std::norm(h.values(k, b)) : h.values(k, b).real();
        power[static_cast<std::size_t>(k)] = sum;
    }
    return power;
}

void write_grid_csv(std::ostream &os, const ImpulseResponseGrid &h, bool include_zeros)
{
    os << "time_s,delay_s,re,im\n";
    for (std::int64_t k = 0; k < h.steps(); ++k)
        for (std::int64_t b = 0; b < h.bins(); ++b)
        {
            const cplx v = h.values(k, b);
            if (!include_zeros && v == cplx{})
                continue;
            os << csv::num(h.time_s(k)) << ',' << csv::num(h.delay_s(b)) << ',' << csv::num(v.real())
               << ',' << csv::num(v.imag()) << '\n';
        }
}

void write_grid_binary(std::ostream &os, const ImpulseResponseGrid &h)
{
    for (std::int64_t b = 0; b < h.bins(); ++b)
        for (std::int64_t k = 0; k < h.steps(); ++k)
        {
            put_f64(os, h.values(k, b).real());
            put_f64(os, h.values(k, b).imag());
        }
}

ImpulseResponseGrid read_grid_binary(std::istream &is, std::int64_t steps, std::int64_t bins,
                                     double dt_s, double dtau_s)
{
    ImpulseResponseGrid h;
    h.values = ComplexMatrix::Zero(steps, bins);
    h.dt_s = dt_s;
    h.dtau_s = dtau_s;
    for (std::int64_t b = 0; b < bins; ++b)
        for (std::int64_t k = 0; k < steps; ++k)
        {
            const double re = get_f64(is);
            const double im = get_f64(is);
            h.values(k, b) = {re, im};
        }
    return h;
}

} // namespace ambit
