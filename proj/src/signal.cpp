#include "blurdm/signal.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace blurdm {

namespace {
std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    if (shape.empty()) return 0;
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw std::invalid_argument("Signal: zero-sized dimension");
        n *= d;
    }
    return n;
}
}  // namespace

Signal::Signal(std::vector<std::size_t> shp, std::vector<double> vals)
    : shape(std::move(shp)), values(std::move(vals)) {
    if (shape.empty() || shape.size() > 2)
        throw std::invalid_argument("Signal: rank must be 1 or 2");
    if (shape_numel(shape) != values.size())
        throw std::invalid_argument("Signal: element count does not match shape");
}

Signal Signal::zeros(const std::vector<std::size_t>& shape) {
    return Signal(shape, std::vector<double>(shape_numel(shape), 0.0));
}

Signal Signal::full(const std::vector<std::size_t>& shape, double v) {
    return Signal(shape, std::vector<double>(shape_numel(shape), v));
}

Signal Signal::scalar(double v) { return Signal({1}, {v}); }

Signal Signal::vector(std::vector<double> vals) {
    std::size_t n = vals.size();
    return Signal({n}, std::move(vals));
}

Signal Signal::matrix(std::size_t rows, std::size_t cols, std::vector<double> vals) {
    return Signal({rows, cols}, std::move(vals));
}

bool Signal::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_same_shape(const Signal& a, const Signal& b, const std::string& op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(op + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

Signal add(const Signal& a, const Signal& b) {
    require_same_shape(a, b, "add");
    Signal out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.values[i] += b.values[i];
    return out;
}

Signal sub(const Signal& a, const Signal& b) {
    require_same_shape(a, b, "sub");
    Signal out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.values[i] -= b.values[i];
    return out;
}

Signal mul(const Signal& a, const Signal& b) {
    require_same_shape(a, b, "mul");
    Signal out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.values[i] *= b.values[i];
    return out;
}

Signal scale(const Signal& a, double c) {
    Signal out = a;
    for (double& v : out.values) v *= c;
    return out;
}

Signal add_scaled(const Signal& a, double c, const Signal& b) {
    require_same_shape(a, b, "add_scaled");
    Signal out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out.values[i] += c * b.values[i];
    return out;
}

double max_abs(const Signal& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs_diff(const Signal& a, const Signal& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i)
        m = std::max(m, std::fabs(a.values[i] - b.values[i]));
    return m;
}

double l2_norm(const Signal& a) {
    double s = 0.0;
    for (double v : a.values) s += v * v;
    return std::sqrt(s);
}

double mean_value(const Signal& a) {
    if (a.numel() == 0) throw std::invalid_argument("mean_value: empty signal");
    double s = std::accumulate(a.values.begin(), a.values.end(), 0.0);
    return s / static_cast<double>(a.numel());
}

double mean_sq_diff(const Signal& a, const Signal& b) {
    require_same_shape(a, b, "mean_sq_diff");
    double s = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return s / static_cast<double>(a.numel());
}

std::string shape_str(const Signal& a) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < a.shape.size(); ++i) {
        if (i) os << ",";
        os << a.shape[i];
    }
    os << ")";
    return os.str();
}

}  // namespace blurdm
