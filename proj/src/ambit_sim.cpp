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
#include "ambit/ambit_sim.hpp"

#include "ambit/error.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <mutex>
#include <string>

namespace ambit
{
namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::int32_t delay_bin(double distance_m, double bin_length_m, std::int64_t bin_count,
                       std::int64_t row)
{
    const auto b = static_cast<std::int64_t>(std::floor(distance_m / bin_length_m));
    if (b >= bin_count)
        throw delay_overflow_error(static_cast<std::size_t>(row), static_cast<std::size_t>(b),
                                   static_cast<std::size_t>(bin_count));
    return static_cast<std::int32_t>(b);
}

// Plain complex multiply-add; avoids the NaN-recovery path of operator*.
inline void mul_add(cplx &acc, const cplx &a, const cplx &b)
{
    const double re = a.real() * b.real() - a.imag() * b.imag();
    const double im = a.real() * b.imag() + a.imag() * b.real();
    acc = {acc.real() + re, acc.imag() + im};
}

void check_field(const LevyFieldRealization &field, const GridSpec &grid)
{
    if (field.column_count() != grid.column_count() ||
        field.lateral_count() != grid.lateral_count() || field.column_begin != grid.column_begin ||
        field.lateral_begin != -grid.m_half)
        throw contract_error("field shape does not match the grid");
}

void check_conv_shape(std::int64_t xr, std::int64_t xc, std::int64_t yr, std::int64_t yc,
                      const ComplexMatrix &z)
{
    if (xr < 1 || yr < 1 || xc < 1 || yc < 1)
        throw contract_error("convolution operands must be non-empty");
    if (z.rows() != xr + yr - 1 || z.cols() != xc + yc - 1)
        throw contract_error("accumulator is " + std::to_string(z.rows()) + "x" +
                             std::to_string(z.cols()) + ", expected " +
                             std::to_string(xr + yr - 1) + "x" + std::to_string(xc + yc - 1));
}

std::mutex &fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

class FftwBuffer
{
public:
    explicit FftwBuffer(std::size_t n)
        : data_(static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n))), n_(n)
    {
        if (!data_)
            throw std::bad_alloc();
        clear();
    }
    ~FftwBuffer() { fftw_free(data_); }
    FftwBuffer(const FftwBuffer &) = delete;
    FftwBuffer &operator=(const FftwBuffer &) = delete;

    fftw_complex *get() { return data_; }
    cplx &operator[](std::size_t i) { return reinterpret_cast<cplx *>(data_)[i]; }
    void clear()
    {
        for (std::size_t i = 0; i < n_; ++i)
            data_[i][0] = data_[i][1] = 0.0;
    }

private:
    fftw_complex *data_;
    std::size_t n_;
};

class FftwPlan
{
public:
    FftwPlan(int rows, int cols, FftwBuffer &buf, int sign)
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_2d(rows, cols, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
    }
    ~FftwPlan()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftwPlan(const FftwPlan &) = delete;
    FftwPlan &operator=(const FftwPlan &) = delete;

    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

} // namespace

ComplexMatrix ImpulseRows::to_dense() const
{
    ComplexMatrix m = ComplexMatrix::Zero(row_count(), bin_count);
    for (std::int64_t r = 0; r < row_count(); ++r)
        if (rows[r].bin >= 0)
            m(r, rows[r].bin) = rows[r].value;
    return m;
}

ImpulseRows build_xmat(const ChannelParams &params, const GridSpec &grid,
                       const TrajectoryModel &traj, std::int64_t lateral, AmbitSet ambit_set)
{
    if (lateral < -grid.m_half || lateral > grid.m_half)
        throw contract_error("lateral index " + std::to_string(lateral) + " outside [-M, M]");

    const std::int64_t n = grid.n_half;
    const double bin_length_m = params.light_speed_m_per_s * grid.dtau_s();
    const double dy = static_cast<double>(lateral) * grid.dy_m();

    ImpulseRows x;
    x.bin_count = grid.d_count;
    x.rows.resize(static_cast<std::size_t>(2 * n + 1));
    for (std::int64_t a = 0; a <= 2 * n; ++a)
    {
        const std::int64_t offset = a - n;
        if (ambit_set == AmbitSet::causal_half_disc && offset >= 0)
            continue;
        const double dx = grid.column_x_m(offset, traj.initial_speed_m_per_s);
        const double d1 = std::hypot(dx, dy);
        if (d1 > grid.disc_radius_m)
            continue;
        auto &row = x.rows[static_cast<std::size_t>(a)];
        row.bin = delay_bin(d1, bin_length_m, grid.d_count, a);
        row.value = std::polar(1.0, params.wave_number_per_m * d1);
    }
    return x;
}

ImpulseRows build_ymat(const ChannelParams &params, const SceneGeometry &scene,
                       const GridSpec &grid, const TrajectoryModel &traj,
                       const LevyFieldRealization &field, std::int64_t lateral)
{
    check_field(field, grid);
    if (lateral < -grid.m_half || lateral > grid.m_half)
        throw contract_error("lateral index " + std::to_string(lateral) + " outside [-M, M]");

    const double bin_length_m = params.light_speed_m_per_s * grid.dtau_s();
    const double sqrt_gs = std::sqrt(params.ref_gain_scatter);
    const double half_gamma = 0.5 * params.path_loss_exponent;
    const double y = traj.initial_y_m + static_cast<double>(lateral) * grid.dy_m();

    ImpulseRows out;
    out.bin_count = grid.d_count;
    out.rows.resize(static_cast<std::size_t>(grid.column_count()));
    for (std::int64_t b = 0; b < grid.column_count(); ++b)
    {
        const std::int64_t column = grid.column_begin + b;
        const std::int32_t increment = field.increment(column, lateral);
        if (increment == 0)
            continue;
        const double x = grid.column_x_m(column, traj.initial_speed_m_per_s);
        const double d2 = euclidean_distance(scene.bs_x_m, scene.bs_y_m, x, y);
        auto &row = out.rows[static_cast<std::size_t>(b)];
        row.bin = delay_bin(d2, bin_length_m, grid.d_count, b);
        row.value = sqrt_gs * std::pow(d2, -half_gamma) * std::polar(1.0, params.wave_number_per_m * d2) *
                    (field.volatility(column, lateral) * static_cast<double>(increment));
    }
    return out;
}

ImpulseRows squared_magnitude(const ImpulseRows &m)
{
    ImpulseRows out = m;
    for (auto &row : out.rows)
        if (row.bin >= 0)
            row.value = std::norm(row.value);
    return out;
}

void conv2d_fold_accumulate(const ComplexMatrix &x, const ComplexMatrix &y, ComplexMatrix &z)
{
    check_conv_shape(x.rows(), x.cols(), y.rows(), y.cols(), z);
    const std::int64_t xr = x.rows();

    struct Entry
    {
        std::int64_t row;
        std::int64_t col;
        cplx value;
    };
    std::vector<Entry> xs;
    for (std::int64_t a = 0; a < xr; ++a)
        for (std::int64_t c = 0; c < x.cols(); ++c)
            if (x(a, c) != cplx{})
                xs.push_back({xr - 1 - a, c, x(a, c)});

    for (std::int64_t b = 0; b < y.rows(); ++b)
        for (std::int64_t c = 0; c < y.cols(); ++c)
        {
            const cplx yv = y(b, c);
            if (yv == cplx{})
                continue;
            for (const auto &e : xs)
                mul_add(z(e.row + b, e.col + c), e.value, yv);
        }
}

void conv2d_fold_accumulate(const ImpulseRows &x, const ImpulseRows &y, ComplexMatrix &z)
{
    check_conv_shape(x.row_count(), x.bin_count, y.row_count(), y.bin_count, z);
    const std::int64_t xr = x.row_count();
    const std::int64_t stride = z.cols();

    // Folded x as flat offsets into z relative to (y row, y bin).
    struct Entry
    {
        std::int64_t offset;
        cplx value;
    };
    std::vector<Entry> xs;
    xs.reserve(x.rows.size());
    for (std::int64_t a = 0; a < xr; ++a)
    {
        const auto &row = x.rows[static_cast<std::size_t>(a)];
        if (row.bin >= 0)
            xs.push_back({(xr - 1 - a) * stride + row.bin, row.value});
    }

    cplx *zdata = z.data();
    for (std::int64_t b = 0; b < y.row_count(); ++b)
    {
        const auto &row = y.rows[static_cast<std::size_t>(b)];
        if (row.bin < 0)
            continue;
        cplx *base = zdata + b * stride + row.bin;
        const cplx yv = row.value;
        for (const auto &e : xs)
            mul_add(base[e.offset], e.value, yv);
    }
}

void conv2d_fold_accumulate_fft(const ComplexMatrix &x, const ComplexMatrix &y, ComplexMatrix &z,
                                std::int64_t block_rows)
{
    check_conv_shape(x.rows(), x.cols(), y.rows(), y.cols(), z);
    if (block_rows < 1)
        throw contract_error("block_rows must be positive");
    block_rows = std::min(block_rows, y.rows());

    const std::int64_t xr = x.rows();
    const std::int64_t fr = xr + block_rows - 1;
    const std::int64_t fc = x.cols() + y.cols() - 1;
    const auto n = static_cast<std::size_t>(fr * fc);

    FftwBuffer kernel(n);
    FftwBuffer block(n);
    const FftwPlan kernel_forward(static_cast<int>(fr), static_cast<int>(fc), kernel, FFTW_FORWARD);
    const FftwPlan block_forward(static_cast<int>(fr), static_cast<int>(fc), block, FFTW_FORWARD);
    const FftwPlan block_backward(static_cast<int>(fr), static_cast<int>(fc), block, FFTW_BACKWARD);

    for (std::int64_t a = 0; a < xr; ++a)
        for (std::int64_t c = 0; c < x.cols(); ++c)
            kernel[static_cast<std::size_t>((xr - 1 - a) * fc + c)] = x(a, c);
    kernel_forward.execute();

    const double scale = 1.0 / static_cast<double>(n);
    for (std::int64_t b0 = 0; b0 < y.rows(); b0 += block_rows)
    {
        const std::int64_t rows = std::min(block_rows, y.rows() - b0);
        block.clear();
        for (std::int64_t b = 0; b < rows; ++b)
            for (std::int64_t c = 0; c < y.cols(); ++c)
                block[static_cast<std::size_t>(b * fc + c)] = y(b0 + b, c);
        block_forward.execute();
        for (std::size_t i = 0; i < n; ++i)
            block[i] *= kernel[i];
        block_backward.execute();

        // Overlap-add: the block's partial result starts at row b0.
        const std::int64_t valid_rows = std::min(xr + rows - 1, z.rows() - b0);
        for (std::int64_t r = 0; r < valid_rows; ++r)
            for (std::int64_t c = 0; c < fc; ++c)
                z(b0 + r, c) += block[static_cast<std::size_t>(r * fc + c)] * scale;
    }
}

ImpulseResponseGrid velocity_warp(const ComplexMatrix &backbone, const TrajectoryModel &traj,
                                  const GridSpec &grid, Response response)
{
    const std::int64_t bins = grid.d_count;
    if (backbone.cols() < bins)
        throw contract_error("backbone has fewer than D delay columns");

    const std::vector<double> positions =
        stepped_positions(traj, grid.dt_s(), static_cast<std::size_t>(grid.p_count));
    const std::int64_t span = backbone.rows();
    auto backbone_x = [&](std::int64_t j) { return grid.column_x_m(j, traj.initial_speed_m_per_s); };

    ImpulseResponseGrid h;
    h.values = ComplexMatrix::Zero(grid.p_count, bins);
    h.dt_s = grid.dt_s();
    h.dtau_s = grid.dtau_s();
    h.response = response;

    const double step = traj.initial_speed_m_per_s * grid.dt_s();
    for (std::int64_t k = 0; k < grid.p_count; ++k)
    {
        const double xk = positions[static_cast<std::size_t>(k)];
        auto j = static_cast<std::int64_t>(std::floor(xk / step));
        double alpha = (xk - backbone_x(j)) / (backbone_x(j + 1) - backbone_x(j));
        // Positions that land on a backbone point up to rounding use that row alone.
        if (alpha > 1.0 - 1e-9)
        {
            ++j;
            alpha = 0.0;
        }
        else if (alpha < 1e-9)
        {
            alpha = 0.0;
        }
        if (j < 0 || j >= span || (alpha > 0.0 && j + 1 >= span))
            throw horizon_error("MU position " + std::to_string(xk) + " m at step " +
                                std::to_string(k) +
                                " lies outside the backbone; increase the backbone length (P)");

        if (alpha == 0.0)
            h.values.row(k) = backbone.row(j).head(bins);
        else
            h.values.row(k) =
                alpha * backbone.row(j + 1).head(bins) + (1.0 - alpha) * backbone.row(j).head(bins);
    }
    return h;
}

std::int64_t accumulator_row(const GridSpec &grid, std::int64_t backbone_index)
{
    return backbone_index + grid.n_half - grid.column_begin;
}

ImpulseResponseGrid simulate_ambit(const ChannelParams &params, const SceneGeometry &scene,
                                   const TrajectoryModel &traj, const GridSpec &grid,
                                   const LevyFieldRealization &field, const AmbitOptions &options)
{
    check_field(field, grid);
    traj.check_horizon(static_cast<double>(grid.p_count - 1) * grid.dt_s());

    const bool power = options.response == Response::power_delay_profile;
    const std::int64_t xr = 2 * grid.n_half + 1;
    const std::int64_t yr = grid.column_count();
    const std::int64_t bins = grid.d_count;

    AmbitTiming timing;
    ComplexMatrix z = ComplexMatrix::Zero(xr + yr - 1, 2 * bins - 1);

    for (std::int64_t lateral = -grid.m_half; lateral <= grid.m_half; ++lateral)
    {
        auto start = clock_type::now();
        ImpulseRows y = build_ymat(params, scene, grid, traj, field, lateral);
        bool any = false;
        for (const auto &row : y.rows)
            any = any || row.bin >= 0;
        if (!any)
        {
            timing.build_s += seconds_since(start);
            continue;
        }
        ImpulseRows x = build_xmat(params, grid, traj, lateral, options.ambit_set);
        if (power)
        {
            x = squared_magnitude(x);
            y = squared_magnitude(y);
        }
        timing.build_s += seconds_since(start);

        start = clock_type::now();
        if (options.method == ConvolutionMethod::sparse)
            conv2d_fold_accumulate(x, y, z);
        else
            conv2d_fold_accumulate_fft(x.to_dense(), y.to_dense(), z, options.fft_block_rows);
        timing.convolve_s += seconds_since(start);
    }

    const auto start = clock_type::now();
    // The FFT route leaves rounding noise in bins that receive no path.
    const double noise_floor =
        options.method == ConvolutionMethod::sparse ? 0.0 : 1e-9 * z.cwiseAbs().maxCoeff();
    ComplexMatrix backbone(grid.backbone_count, bins);
    for (std::int64_t j = 0; j < grid.backbone_count; ++j)
    {
        const std::int64_t r = accumulator_row(grid, j);
        for (std::int64_t b = bins; b < z.cols(); ++b)
            if (std::abs(z(r, b)) > noise_floor)
                throw delay_overflow_error(static_cast<std::size_t>(j), static_cast<std::size_t>(b),
                                           static_cast<std::size_t>(bins));
        backbone.row(j) = z.row(r).head(bins);
    }
    ImpulseResponseGrid h = velocity_warp(backbone, traj, grid, options.response);

    if (options.include_los)
    {
        const double bin_length_m = params.light_speed_m_per_s * grid.dtau_s();
        for (std::int64_t k = 0; k < h.steps(); ++k)
        {
            const Point mu = mu_position(traj, h.time_s(k));
            const double d = euclidean_distance(scene.bs_x_m, scene.bs_y_m, mu.x_m, mu.y_m);
            const auto b = delay_bin(d, bin_length_m, bins, k);
            if (power)
                h.values(k, b) += params.ref_gain_los * std::pow(d, -params.path_loss_exponent);
            else
                h.values(k, b) += std::sqrt(params.ref_gain_los) *
                                  std::pow(d, -0.5 * params.path_loss_exponent) *
                                  std::polar(1.0, params.wave_number_per_m * d);
        }
    }
    timing.warp_s = seconds_since(start);

    if (options.timing)
        *options.timing = timing;
    return h;
}

} // namespace ambit
