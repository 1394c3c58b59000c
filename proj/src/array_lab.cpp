// SPDX-License-Identifier: Apache-2.0
//
// cylmimo - near-field cylindrical MIMO millimeter-wave imaging library
// Copyright (C) 2026 The cylmimo authors
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

#include "cylmimo/array_lab.hpp"
#include "cylmimo/fft.hpp"
#include "cylmimo/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace cylmimo
{
    void LinearArraySpec::validate() const
    {
        if (!(length_L > 0.0) || !(spacing > 0.0) || !(R0 > 0.0) || !(frequency_hz > 0.0))
            throw validation_error("LinearArraySpec: all parameters must be positive");
        (void)intervals();
    }

    std::size_t LinearArraySpec::intervals() const
    {
        const double r = length_L / spacing;
        const double n = std::round(r);
        if (n < 1.0 || std::abs(r - n) > 1e-6 * n)
            throw validation_error("LinearArraySpec: spacing does not divide the array length into an integer count");
        return std::size_t(n);
    }

    std::vector<double> LinearArraySpec::positions() const
    {
        const std::size_t n = intervals();
        std::vector<double> z(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            z[i] = -0.5 * length_L + double(i) * length_L / double(n);
        return z;
    }

    double LinearArraySpec::wavenumber() const
    {
        const double k = 2.0 * pi / wavelength();
        return role == ArrayRole::monostatic ? 2.0 * k : k;
    }

    BeamPatternResult make_pattern(std::vector<double> coords, std::vector<cdouble> values, std::string method)
    {
        if (coords.size() != values.size() || coords.empty())
            throw validation_error("make_pattern: coordinate and value lists differ in length");
        BeamPatternResult r;
        double peak = 0.0;
        for (const auto &v : values)
            peak = std::max(peak, std::abs(v));
        r.coords = std::move(coords);
        r.complex = std::move(values);
        r.method = std::move(method);
        r.linear.resize(r.complex.size());
        r.db.resize(r.complex.size());
        for (std::size_t i = 0; i < r.complex.size(); ++i)
        {
            r.linear[i] = peak > 0.0 ? std::abs(r.complex[i]) / peak : 0.0;
            r.db[i] = 20.0 * std::log10(std::max(r.linear[i], 1e-300));
        }
        return r;
    }

    static std::vector<double> evaluation_grid(const LinearArraySpec &s, const BeamOptions &opt)
    {
        const double half = opt.half_span > 0.0 ? opt.half_span : s.length_L;
        const double step = s.wavelength() / opt.samples_per_lambda;
        const std::size_t n = std::size_t(std::floor(2.0 * half / step + 1e-9)) + 1;
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i)
            z[i] = -half + double(i) * step;
        return z;
    }

    static std::vector<cdouble> one_way(const LinearArraySpec &s, BeamMethod method, const BeamOptions &opt,
                                        const std::vector<double> &zev)
    {
        s.validate();
        const double k = s.wavenumber(), R0 = s.R0;
        const std::vector<double> zs = s.positions();
        std::vector<cdouble> echo(zs.size());
        for (std::size_t n = 0; n < zs.size(); ++n)
            echo[n] = std::polar(1.0, -k * std::sqrt(R0 * R0 + zs[n] * zs[n]));

        std::vector<cdouble> g(zev.size(), cdouble(0.0));
        if (method == BeamMethod::bp)
        {
            for (std::size_t i = 0; i < zev.size(); ++i)
            {
                cdouble acc(0.0);
                for (std::size_t n = 0; n < zs.size(); ++n)
                {
                    const double dz = zev[i] - zs[n];
                    acc += echo[n] * std::polar(1.0, k * std::sqrt(R0 * R0 + dz * dz));
                }
                g[i] = acc;
            }
            return g;
        }

        // spatial spectrum of the (zero-filled) aperture data
        SpectrumTensor t({make_axis(AxisLabel::z_R, zs)}, echo);
        double d = s.length_L / double(s.intervals());
        if (opt.zero_fill)
        {
            if (opt.zero_fill_P < 1)
                throw validation_error("beam_pattern: zero-fill factor must be >= 1");
            t = zero_fill(t, AxisLabel::z_R, opt.zero_fill_P);
            d /= double(opt.zero_fill_P);
        }
        const double period = opt.spectral_period > 0.0 ? opt.spectral_period : 8.0 * s.length_L;
        DftOptions dopt;
        dopt.fft_size = std::max(t.size(), std::size_t(std::ceil(period / d - 1e-9)));
        dopt.pad_pow2 = true;
        dopt.phase_reference = true;
        t = dft_axis(t, AxisLabel::z_R, Direction::forward, dopt);
        if (opt.spectrum_filter)
        {
            const double kzmax = support_bound_kz(R0, s.length_L, opt.target_extent_D, k);
            SpectralWindow w;
            w.bands.push_back({AxisLabel::k_zR, -kzmax, kzmax});
            t = apply_window(t, w);
        }
        // focus at R0 and evaluate the inverse transform on the profile grid
        const auto &kz = t.axes()[0].coords;
        const std::size_t N = kz.size();
        std::vector<cdouble> F(N);
        for (std::size_t m = 0; m < N; ++m)
            F[m] = std::abs(kz[m]) < k ? t.data()[m] * std::polar(1.0, std::sqrt(k * k - kz[m] * kz[m]) * R0) : cdouble(0.0);
        for (std::size_t i = 0; i < zev.size(); ++i)
        {
            cdouble acc(0.0);
            for (std::size_t m = 0; m < N; ++m)
                if (F[m] != cdouble(0.0))
                    acc += F[m] * std::polar(1.0, kz[m] * zev[i]);
            g[i] = acc / double(N);
        }
        return g;
    }

    static std::string method_tag(BeamMethod m, const BeamOptions &o)
    {
        if (m == BeamMethod::bp)
            return "bp";
        std::string t = "rma";
        if (o.zero_fill)
            t += "+zf";
        if (o.spectrum_filter)
            t += "+filter";
        return t;
    }

    BeamPatternResult beam_pattern(const LinearArraySpec &spec, BeamMethod method, const BeamOptions &opt)
    {
        const auto z = evaluation_grid(spec, opt);
        return make_pattern(z, one_way(spec, method, opt, z), method_tag(method, opt));
    }

    BeamPatternResult beam_pattern(const LinearArraySpec &tx, const BeamOptions &tx_opt,
                                   const LinearArraySpec &rx, const BeamOptions &rx_opt, BeamMethod method)
    {
        if (tx.frequency_hz != rx.frequency_hz || tx.R0 != rx.R0)
            throw validation_error("beam_pattern: transmit and receive arrays must share frequency and R0");
        if ((tx_opt.zero_fill || rx_opt.zero_fill) && integer_ratio(tx.spacing, rx.spacing) == 0)
            throw validation_error("beam_pattern: zero filling requires an integer spacing ratio between the arrays");
        BeamOptions grid_opt = rx_opt;
        grid_opt.half_span = std::max(tx_opt.half_span > 0.0 ? tx_opt.half_span : tx.length_L,
                                      rx_opt.half_span > 0.0 ? rx_opt.half_span : rx.length_L);
        const auto z = evaluation_grid(rx, grid_opt);
        const auto a = one_way(tx, method, tx_opt, z);
        const auto b = one_way(rx, method, rx_opt, z);
        std::vector<cdouble> p(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            p[i] = a[i] * b[i];
        return make_pattern(z, std::move(p), "mimo-" + method_tag(method, tx_opt));
    }

    QualityMetrics measure_metrics(const BeamPatternResult &p)
    {
        const auto &a = p.linear;
        const auto &z = p.coords;
        const std::size_t n = a.size();
        if (n < 3)
            throw validation_error("measure_metrics: profile too short");
        const std::size_t i = std::size_t(std::max_element(a.begin(), a.end()) - a.begin());
        if (i == 0 || i == n - 1)
            throw validation_error("measure_metrics: global maximum lies on the profile edge");

        const double t = 1.0 / std::sqrt(2.0);
        std::size_t r = i, l = i;
        while (r + 1 < n && a[r] >= t)
            ++r;
        while (l > 0 && a[l] >= t)
            --l;
        if (a[r] >= t || a[l] >= t)
            throw numeric_error("measure_metrics: -3 dB level not reached inside the profile");
        const double zr = z[r - 1] + (a[r - 1] - t) / (a[r - 1] - a[r]) * (z[r] - z[r - 1]);
        const double zl = z[l + 1] + (a[l + 1] - t) / (a[l + 1] - a[l]) * (z[l] - z[l + 1]);

        QualityMetrics m;
        m.resolution = zr - zl;

        // mainlobe bounded by the first local minima
        std::size_t hi = i, lo = i;
        while (hi + 1 < n && a[hi + 1] < a[hi])
            ++hi;
        while (lo > 0 && a[lo - 1] < a[lo])
            --lo;
        double best = -1.0;
        std::size_t qbest = 0;
        for (std::size_t q = 1; q + 1 < n; ++q)
        {
            if (q >= lo && q <= hi)
                continue;
            if (a[q] >= a[q - 1] && a[q] >= a[q + 1] && a[q] > best)
            {
                best = a[q];
                qbest = q;
            }
        }
        if (best > 0.0)
        {
            m.pslr = 20.0 * std::log10(best);
            m.strongest_lobe_offset = std::abs(z[qbest] - z[i]);
            if (*m.pslr > -15.0)
                m.grating_lobe_offset = m.strongest_lobe_offset;
        }
        return m;
    }

    double grating_lobe_spacing(double lambda0, double R0, double L, double D)
    {
        if (!(lambda0 > 0.0) || !(R0 > 0.0) || !(L > 0.0))
            throw validation_error("grating_lobe_spacing: lambda0, R0, L must be positive");
        if (!(D > 0.0) || D > L)
            throw validation_error("grating_lobe_spacing: D must lie in (0, L]");
        const double a = 0.5 * L, b = 0.5 * L - D;
        const double bracket = a / std::sqrt(R0 * R0 + a * a) - b / std::sqrt(R0 * R0 + b * b);
        return lambda0 / bracket;
    }

    double grating_lobe_spacing_approx(double lambda0, double R0, double D)
    {
        if (!(D > 0.0))
            throw validation_error("grating_lobe_spacing_approx: D must be positive");
        return lambda0 * R0 / D;
    }

    double nyquist_spacing(double lambda0, double R0, double L, double D)
    {
        const double a = L + D;
        if (!(a > 0.0))
            throw validation_error("nyquist_spacing: L + D must be positive");
        return lambda0 * std::sqrt(R0 * R0 + a * a / 4.0) / a;
    }

    double angular_sampling_bound(double lambda0, double D)
    {
        if (!(D > 0.0))
            throw validation_error("angular_sampling_bound: D must be positive");
        return lambda0 / D;
    }

    Resolution resolution_formulas(double lambda_c, double Theta_h, double Theta_z, double B)
    {
        if (!(lambda_c > 0.0) || !(B > 0.0) || !(Theta_h > 0.0) || !(Theta_z > 0.0) || Theta_h > pi || Theta_z > pi)
            throw validation_error("resolution_formulas: requires lambda_c > 0, B > 0 and angles in (0, pi]");
        return {lambda_c / (4.0 * std::sin(Theta_h / 2.0)), speed_of_light / (2.0 * B),
                lambda_c / (4.0 * std::sin(Theta_z / 2.0))};
    }

    std::vector<ScenarioResult> table1_scenarios(const Table1Setup &s)
    {
        const double lambda = speed_of_light / s.frequency_hz;
        // fully sampled spacing: the no-aliasing bound rounded down to divide L
        const double bound = nyquist_spacing(lambda, s.R0, s.L, 0.0);
        const double n_full = std::ceil(s.L / bound - 1e-12);
        const double d_full = s.L / n_full;

        LinearArraySpec full{s.L, d_full, ArrayRole::rx, s.R0, s.frequency_hz};
        LinearArraySpec sparse{s.L, s.sparse_spacing, ArrayRole::tx, s.R0, s.frequency_hz};
        LinearArraySpec mono{s.L, d_full / 2.0, ArrayRole::monostatic, s.R0, s.frequency_hz};

        BeamOptions plain, zf, zff, filt;
        zf.zero_fill = true;
        zf.zero_fill_P = s.P;
        zff = zf;
        zff.spectrum_filter = true;
        filt.spectrum_filter = true;

        std::vector<ScenarioResult> out;
        auto add = [&](const std::string &label, BeamPatternResult p)
        {
            QualityMetrics m = measure_metrics(p);
            out.push_back({label, m, std::move(p)});
        };
        add("fully sampled array by BP", beam_pattern(full, BeamMethod::bp, plain));
        add("fully sampled array by RMA", beam_pattern(full, BeamMethod::rma, plain));
        add("undersampled array by RMA without zero filling", beam_pattern(sparse, BeamMethod::rma, plain));
        add("undersampled array by RMA with zero filling but without spectrum filtering", beam_pattern(sparse, BeamMethod::rma, zf));
        add("undersampled array by RMA with zero filling and spectrum filtering", beam_pattern(sparse, BeamMethod::rma, zff));
        add("MIMO array by BP", beam_pattern(sparse, plain, full, plain, BeamMethod::bp));
        add("MIMO array by RMA without spectrum filtering", beam_pattern(sparse, zf, full, plain, BeamMethod::rma));
        add("MIMO array by RMA with spectrum filtering", beam_pattern(sparse, zff, full, filt, BeamMethod::rma));
        add("Monostatic array by RMA", beam_pattern(mono, BeamMethod::rma, plain));
        return out;
    }
}
