#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blurdm/rng.hpp"
#include "blurdm/signal.hpp"

namespace blurdm::ad {

class Tape;

// Lightweight handle into a tape. Valid only as long as its tape lives.
class Node {
  public:
    Node() = default;
    const Signal& value() const;
    const Signal& grad() const;
    int id() const { return id_; }

  private:
    friend class Tape;
    Node(Tape* t, int id) : tape_(t), id_(id) {}
    Tape* tape_ = nullptr;
    int id_ = -1;
};

using GradMap = std::unordered_map<std::string, Signal>;

// Define-by-run reverse-mode tape over Signals. The graph is rebuilt for
// every forward evaluation; creation order doubles as the topological order
// replayed by backward(). One backward pass per tape; a second call throws.
// A tape is confined to a single thread.
class Tape {
  public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Trainable input. Named leaves appear in the GradMap returned by
    // backward(); unnamed ones are read through Node::grad().
    Node leaf(Signal value, std::string name = "");
    // Input that never receives a gradient.
    Node constant(Signal value);

    Node add(Node a, Node b);
    Node sub(Node a, Node b);
    Node scale(Node a, double c);
    Node mul(Node a, Node b);  // elementwise
    Node matvec(Node W, Node x);
    Node matmul(Node A, Node B);
    // W is (out x in), b is (out). A rank-1 x is treated as one sample
    // (W x + b); a rank-2 x as a batch of row samples (x W^T + b per row).
    Node affine(Node W, Node x, Node b);
    Node relu(Node a);  // derivative at 0 is 0
    Node tanh(Node a);
    // vectors concatenate end-to-end; matrices side-by-side (same row count)
    Node concat(Node a, Node b);
    Node slice_cols(Node a, std::size_t c0, std::size_t c1);
    Node sum(Node a);
    Node mean(Node a);
    Node l1(Node a);  // mean absolute value, d/dx|x| taken as 0 at 0
    Node l2(Node a);  // mean squared value
    // Elementwise op with caller-supplied value and derivative functions.
    Node custom_unary(Node a, std::function<double(double)> f,
                      std::function<double(double)> df);

    // Accumulates d loss / d leaf for every leaf reachable from a scalar
    // loss and returns the gradients of all named leaves (zeros for named
    // leaves the loss does not depend on).
    GradMap backward(Node loss);

    const Signal& value(Node n) const;
    const Signal& grad(Node n) const;
    std::size_t size() const { return recs_.size(); }

  private:
    struct Rec {
        Signal value;
        Signal grad;
        bool has_grad = false;
        bool requires_grad = false;
        std::string name;
        std::function<void(Tape&, const Signal&)> back;  // receives d loss / d self
    };

    Node push(Rec rec);
    Rec& rec(Node n);
    const Rec& rec(Node n) const;
    void add_grad(int id, const Signal& g);
    void add_grad_scaled(int id, double c, const Signal& g);

    std::vector<Rec> recs_;
    std::vector<int> named_leaves_;
    bool used_ = false;
};

struct GradCheckReport {
    bool pass = false;
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t coords_checked = 0;
};

using LeafSet = std::vector<std::pair<std::string, Signal>>;
using ScalarFn = std::function<Node(Tape&, const std::unordered_map<std::string, Node>&)>;

// Central finite differences (step 1e-5) against the tape gradient on up to
// max_coords randomly chosen parameter coordinates. The relative error of a
// coordinate is |fd - ad| / max(1, |fd|, |ad|); the report carries the worst.
GradCheckReport grad_check(const ScalarFn& f, const LeafSet& theta, double tol, Rng& rng,
                           std::size_t max_coords = 200);

}  // namespace blurdm::ad
