// Copyright 2026 The qecstep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qecstep {

/// Least-squares fit of log10(y) against log10(x); the instrument by which
/// every power-law scaling claim is measured.
struct SlopeFit {
    std::vector<double> x, y;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
    if (x.size() < 4) throw std::invalid_argument("fit_loglog: need at least 4 points");
    SlopeFit f;
    f.x = x;
    f.y = y;
    const size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw std::invalid_argument("fit_loglog: requires positive data");
        lx[i] = std::log10(x[i]);
        ly[i] = std::log10(y[i]);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double dn = static_cast<double>(n);
    f.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / dn;
    double ss_res = 0, ss_tot = 0, mean_y = sy / dn;
    for (size_t i = 0; i < n; ++i) {
        double pred = f.slope * lx[i] + f.intercept;
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

/// Wilson score interval for a binomial rate.
struct RateInterval {
    double rate = 0.0;
    double low = 0.0;
    double high = 0.0;
};

inline RateInterval wilson_interval(long long successes, long long trials, double z = 1.96) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: trials <= 0");
    RateInterval r;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    r.rate = p;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2 * n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    r.low = (center - half) / denom;
    r.high = (center + half) / denom;
    return r;
}

/// Doubles serialized with 17 significant digits for lossless round-trips.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size())
            throw std::invalid_argument("CsvWriter: row width mismatch");
        rows_.push_back(std::move(cells));
    }

    std::string str() const {
        std::ostringstream os;
        write_line(os, header_);
        for (auto& r : rows_) write_line(os, r);
        return os.str();
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("CsvWriter: cannot open " + path);
        f << str();
    }

private:
    static void write_line(std::ostringstream& os, const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace qecstep
