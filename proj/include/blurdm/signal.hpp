#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace blurdm {

// Dense real tensor, rank 1 or 2, row-major. Stands in for images, blur
// residuals, latents and network activations alike. Values are unconstrained
// reals; image-like content is nominally in [0,1].
struct Signal {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    Signal() = default;
    Signal(std::vector<std::size_t> shp, std::vector<double> vals);

    static Signal zeros(const std::vector<std::size_t>& shape);
    static Signal full(const std::vector<std::size_t>& shape, double v);
    static Signal scalar(double v);
    static Signal vector(std::vector<double> vals);
    static Signal matrix(std::size_t rows, std::size_t cols, std::vector<double> vals);

    std::size_t numel() const { return values.size(); }
    std::size_t rank() const { return shape.size(); }
    // Rank-1 signals count as a single row.
    std::size_t rows() const { return shape.size() == 2 ? shape[0] : 1; }
    std::size_t cols() const { return shape.size() == 2 ? shape[1] : (shape.empty() ? 0 : shape[0]); }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

    bool same_shape(const Signal& o) const { return shape == o.shape; }
    bool all_finite() const;
};

// Throws std::invalid_argument naming `op` when shapes differ.
void require_same_shape(const Signal& a, const Signal& b, const std::string& op);

Signal add(const Signal& a, const Signal& b);
Signal sub(const Signal& a, const Signal& b);
Signal mul(const Signal& a, const Signal& b);
Signal scale(const Signal& a, double c);
// a + c*b
Signal add_scaled(const Signal& a, double c, const Signal& b);

double max_abs(const Signal& a);
double max_abs_diff(const Signal& a, const Signal& b);
double l2_norm(const Signal& a);
double mean_value(const Signal& a);
double mean_sq_diff(const Signal& a, const Signal& b);

std::string shape_str(const Signal& a);

}  // namespace blurdm
