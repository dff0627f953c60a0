#include "mis/interp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mis {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("monotone cubic needs >= 2 matching points");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("monotone cubic abscissae must increase strictly");
    }

    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

    m_.assign(n, 0.0);
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        m_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) {
            m_[i] = 0.0;
            m_[i + 1] = 0.0;
            continue;
        }
        const double a = m_[i] / delta[i];
        const double b = m_[i + 1] / delta[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m_[i] = tau * a * delta[i];
            m_[i + 1] = tau * b * delta[i];
        }
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
    if (i == 0) return 0;
    return std::min(i - 1, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    if (x <= x_.front()) return y_.front() + m_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + m_.back() * (x - x_.back());
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    if (x <= x_.front()) return m_.front();
    if (x >= x_.back()) return m_.back();
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (-6 * t2 + 6 * t) * y_[i + 1]) / h + (3 * t2 - 4 * t + 1) * m_[i] +
           (3 * t2 - 2 * t) * m_[i + 1];
}

std::vector<std::vector<double>> read_table(const std::string& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table '" + path + "'");

    std::vector<std::vector<double>> cols(columns);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (!ss.eof()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-numeric entry");
        if (row.empty()) continue;
        if (row.size() != columns) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                                     " columns, found " + std::to_string(row.size()));
        }
        for (std::size_t c = 0; c < columns; ++c) cols[c].push_back(row[c]);
    }
    return cols;
}

}  // namespace mis
