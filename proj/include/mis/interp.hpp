#pragma once

#include <string>
#include <vector>

namespace mis {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Outside the tabulated range the curve is extended linearly with the end
/// slopes, so the function and its derivative exist on the whole real line.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    bool empty() const { return x_.empty(); }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

/// Reads a whitespace-separated numeric table column by column; '#' starts a
/// comment.
/// Throws std::runtime_error on a ragged row or when the column count differs
/// from `columns`.
std::vector<std::vector<double>> read_table(const std::string& path, std::size_t columns);

}  // namespace mis
