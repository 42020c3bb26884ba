#include "blurdm/autodiff.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace blurdm::ad {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::VectorXd;

Eigen::Map<const EMat> as_mat(const Signal& s) {
    return Eigen::Map<const EMat>(s.values.data(), static_cast<Eigen::Index>(s.rows()),
                                  static_cast<Eigen::Index>(s.cols()));
}

Eigen::Map<EMat> as_mat(Signal& s) {
    return Eigen::Map<EMat>(s.values.data(), static_cast<Eigen::Index>(s.rows()),
                            static_cast<Eigen::Index>(s.cols()));
}

Eigen::Map<const EVec> as_vec(const Signal& s) {
    return Eigen::Map<const EVec>(s.values.data(), static_cast<Eigen::Index>(s.numel()));
}

Eigen::Map<EVec> as_vec(Signal& s) {
    return Eigen::Map<EVec>(s.values.data(), static_cast<Eigen::Index>(s.numel()));
}

}  // namespace

const Signal& Node::value() const {
    if (!tape_) throw std::runtime_error("Node: empty handle");
    return tape_->value(*this);
}

const Signal& Node::grad() const {
    if (!tape_) throw std::runtime_error("Node: empty handle");
    return tape_->grad(*this);
}

Node Tape::push(Rec r) {
    recs_.push_back(std::move(r));
    return Node(this, static_cast<int>(recs_.size()) - 1);
}

Tape::Rec& Tape::rec(Node n) {
    if (n.tape_ != this || n.id_ < 0 || n.id_ >= static_cast<int>(recs_.size()))
        throw std::invalid_argument("Tape: node does not belong to this tape");
    return recs_[static_cast<std::size_t>(n.id_)];
}

const Tape::Rec& Tape::rec(Node n) const {
    if (n.tape_ != this || n.id_ < 0 || n.id_ >= static_cast<int>(recs_.size()))
        throw std::invalid_argument("Tape: node does not belong to this tape");
    return recs_[static_cast<std::size_t>(n.id_)];
}

const Signal& Tape::value(Node n) const { return rec(n).value; }

const Signal& Tape::grad(Node n) const {
    const Rec& r = rec(n);
    if (!r.has_grad) throw std::runtime_error("Tape: gradient not materialized for node");
    return r.grad;
}

void Tape::add_grad(int id, const Signal& g) {
    Rec& r = recs_[static_cast<std::size_t>(id)];
    if (!r.requires_grad) return;
    if (!r.has_grad) {
        r.grad = Signal::zeros(r.value.shape);
        r.has_grad = true;
    }
    for (std::size_t i = 0; i < g.numel(); ++i) r.grad.values[i] += g.values[i];
}

void Tape::add_grad_scaled(int id, double c, const Signal& g) {
    Rec& r = recs_[static_cast<std::size_t>(id)];
    if (!r.requires_grad) return;
    if (!r.has_grad) {
        r.grad = Signal::zeros(r.value.shape);
        r.has_grad = true;
    }
    for (std::size_t i = 0; i < g.numel(); ++i) r.grad.values[i] += c * g.values[i];
}

Node Tape::leaf(Signal value, std::string name) {
    Rec r;
    r.value = std::move(value);
    r.requires_grad = true;
    r.name = std::move(name);
    Node n = push(std::move(r));
    if (!recs_.back().name.empty()) named_leaves_.push_back(n.id_);
    return n;
}

Node Tape::constant(Signal value) {
    Rec r;
    r.value = std::move(value);
    r.requires_grad = false;
    return push(std::move(r));
}

Node Tape::add(Node a, Node b) {
    const Rec& ra = rec(a);
    const Rec& rb = rec(b);
    require_same_shape(ra.value, rb.value, "add");
    Rec r;
    r.value = blurdm::add(ra.value, rb.value);
    r.requires_grad = ra.requires_grad || rb.requires_grad;
    int ia = a.id_, ib = b.id_;
    if (r.requires_grad)
        r.back = [ia, ib](Tape& t, const Signal& g) {
            t.add_grad(ia, g);
            t.add_grad(ib, g);
        };
    return push(std::move(r));
}

Node Tape::sub(Node a, Node b) {
    const Rec& ra = rec(a);
    const Rec& rb = rec(b);
    require_same_shape(ra.value, rb.value, "sub");
    Rec r;
    r.value = blurdm::sub(ra.value, rb.value);
    r.requires_grad = ra.requires_grad || rb.requires_grad;
    int ia = a.id_, ib = b.id_;
    if (r.requires_grad)
        r.back = [ia, ib](Tape& t, const Signal& g) {
            t.add_grad(ia, g);
            t.add_grad_scaled(ib, -1.0, g);
        };
    return push(std::move(r));
}

Node Tape::scale(Node a, double c) {
    const Rec& ra = rec(a);
    Rec r;
    r.value = blurdm::scale(ra.value, c);
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia, c](Tape& t, const Signal& g) { t.add_grad_scaled(ia, c, g); };
    return push(std::move(r));
}

Node Tape::mul(Node a, Node b) {
    const Rec& ra = rec(a);
    const Rec& rb = rec(b);
    require_same_shape(ra.value, rb.value, "mul");
    Rec r;
    r.value = blurdm::mul(ra.value, rb.value);
    r.requires_grad = ra.requires_grad || rb.requires_grad;
    int ia = a.id_, ib = b.id_;
    if (r.requires_grad)
        r.back = [ia, ib](Tape& t, const Signal& g) {
            Signal ga = blurdm::mul(g, t.recs_[static_cast<std::size_t>(ib)].value);
            Signal gb = blurdm::mul(g, t.recs_[static_cast<std::size_t>(ia)].value);
            t.add_grad(ia, ga);
            t.add_grad(ib, gb);
        };
    return push(std::move(r));
}

Node Tape::matvec(Node W, Node x) {
    const Rec& rw = rec(W);
    const Rec& rx = rec(x);
    if (rw.value.rank() != 2 || rx.value.rank() != 1 || rw.value.cols() != rx.value.numel())
        throw std::invalid_argument("matvec: W must be (m x n) and x length n");
    Rec r;
    r.value = Signal::zeros({rw.value.rows()});
    as_vec(r.value) = as_mat(rw.value) * as_vec(rx.value);
    r.requires_grad = rw.requires_grad || rx.requires_grad;
    int iw = W.id_, ix = x.id_;
    if (r.requires_grad)
        r.back = [iw, ix](Tape& t, const Signal& g) {
            const Signal& wv = t.recs_[static_cast<std::size_t>(iw)].value;
            const Signal& xv = t.recs_[static_cast<std::size_t>(ix)].value;
            Signal gw = Signal::zeros(wv.shape);
            as_mat(gw) = as_vec(g) * as_vec(xv).transpose();
            t.add_grad(iw, gw);
            Signal gx = Signal::zeros(xv.shape);
            as_vec(gx) = as_mat(wv).transpose() * as_vec(g);
            t.add_grad(ix, gx);
        };
    return push(std::move(r));
}

Node Tape::matmul(Node A, Node B) {
    const Rec& ra = rec(A);
    const Rec& rb = rec(B);
    if (ra.value.rank() != 2 || rb.value.rank() != 2 || ra.value.cols() != rb.value.rows())
        throw std::invalid_argument("matmul: inner dimensions must agree");
    Rec r;
    r.value = Signal::zeros({ra.value.rows(), rb.value.cols()});
    as_mat(r.value).noalias() = as_mat(ra.value) * as_mat(rb.value);
    r.requires_grad = ra.requires_grad || rb.requires_grad;
    int ia = A.id_, ib = B.id_;
    if (r.requires_grad)
        r.back = [ia, ib](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            const Signal& bv = t.recs_[static_cast<std::size_t>(ib)].value;
            Signal gA = Signal::zeros(av.shape);
            as_mat(gA).noalias() = as_mat(g) * as_mat(bv).transpose();
            t.add_grad(ia, gA);
            Signal gB = Signal::zeros(bv.shape);
            as_mat(gB).noalias() = as_mat(av).transpose() * as_mat(g);
            t.add_grad(ib, gB);
        };
    return push(std::move(r));
}

Node Tape::affine(Node W, Node x, Node b) {
    const Rec& rw = rec(W);
    const Rec& rx = rec(x);
    const Rec& rb = rec(b);
    if (rw.value.rank() != 2 || rb.value.rank() != 1)
        throw std::invalid_argument("affine: W must be rank 2 and b rank 1");
    std::size_t out = rw.value.rows(), in = rw.value.cols();
    if (rb.value.numel() != out) throw std::invalid_argument("affine: bias length mismatch");
    if (rx.value.cols() != in) throw std::invalid_argument("affine: input width mismatch");

    Rec r;
    bool batched = rx.value.rank() == 2;
    if (batched) {
        r.value = Signal::zeros({rx.value.rows(), out});
        as_mat(r.value).noalias() = as_mat(rx.value) * as_mat(rw.value).transpose();
        as_mat(r.value).rowwise() += as_vec(rb.value).transpose();
    } else {
        r.value = Signal::zeros({out});
        as_vec(r.value).noalias() = as_mat(rw.value) * as_vec(rx.value);
        as_vec(r.value) += as_vec(rb.value);
    }
    r.requires_grad = rw.requires_grad || rx.requires_grad || rb.requires_grad;
    int iw = W.id_, ix = x.id_, ib = b.id_;
    if (r.requires_grad)
        r.back = [iw, ix, ib, batched](Tape& t, const Signal& g) {
            const Signal& wv = t.recs_[static_cast<std::size_t>(iw)].value;
            const Signal& xv = t.recs_[static_cast<std::size_t>(ix)].value;
            Signal gw = Signal::zeros(wv.shape);
            Signal gx = Signal::zeros(xv.shape);
            Signal gb = Signal::zeros({wv.rows()});
            if (batched) {
                as_mat(gw).noalias() = as_mat(g).transpose() * as_mat(xv);
                as_mat(gx).noalias() = as_mat(g) * as_mat(wv);
                as_vec(gb) = as_mat(g).colwise().sum();
            } else {
                as_mat(gw).noalias() = as_vec(g) * as_vec(xv).transpose();
                as_vec(gx).noalias() = as_mat(wv).transpose() * as_vec(g);
                as_vec(gb) = as_vec(g);
            }
            t.add_grad(iw, gw);
            t.add_grad(ix, gx);
            t.add_grad(ib, gb);
        };
    return push(std::move(r));
}

Node Tape::relu(Node a) {
    const Rec& ra = rec(a);
    Rec r;
    r.value = ra.value;
    for (double& v : r.value.values) v = v > 0.0 ? v : 0.0;
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia](Tape& t, const Signal& g) {
            const Signal& xv = t.recs_[static_cast<std::size_t>(ia)].value;
            Signal gx = g;
            for (std::size_t i = 0; i < gx.numel(); ++i)
                if (xv.values[i] <= 0.0) gx.values[i] = 0.0;
            t.add_grad(ia, gx);
        };
    return push(std::move(r));
}

Node Tape::tanh(Node a) {
    const Rec& ra = rec(a);
    Rec r;
    r.value = ra.value;
    for (double& v : r.value.values) v = std::tanh(v);
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia](Tape& t, const Signal& g) {
            const Signal& xv = t.recs_[static_cast<std::size_t>(ia)].value;
            Signal gx = g;
            for (std::size_t i = 0; i < gx.numel(); ++i) {
                double y = std::tanh(xv.values[i]);
                gx.values[i] *= 1.0 - y * y;
            }
            t.add_grad(ia, gx);
        };
    return push(std::move(r));
}

Node Tape::concat(Node a, Node b) {
    const Rec& ra = rec(a);
    const Rec& rb = rec(b);
    Rec r;
    bool mats = ra.value.rank() == 2 && rb.value.rank() == 2;
    if (mats) {
        if (ra.value.rows() != rb.value.rows())
            throw std::invalid_argument("concat: row counts must match");
        std::size_t rows = ra.value.rows(), ca = ra.value.cols(), cb = rb.value.cols();
        r.value = Signal::zeros({rows, ca + cb});
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < ca; ++j) r.value.at(i, j) = ra.value.at(i, j);
            for (std::size_t j = 0; j < cb; ++j) r.value.at(i, ca + j) = rb.value.at(i, j);
        }
    } else if (ra.value.rank() == 1 && rb.value.rank() == 1) {
        std::vector<double> vals = ra.value.values;
        vals.insert(vals.end(), rb.value.values.begin(), rb.value.values.end());
        r.value = Signal::vector(std::move(vals));
    } else {
        throw std::invalid_argument("concat: operands must share rank");
    }
    r.requires_grad = ra.requires_grad || rb.requires_grad;
    int ia = a.id_, ib = b.id_;
    if (r.requires_grad)
        r.back = [ia, ib, mats](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            const Signal& bv = t.recs_[static_cast<std::size_t>(ib)].value;
            Signal ga = Signal::zeros(av.shape);
            Signal gb = Signal::zeros(bv.shape);
            if (mats) {
                std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
                for (std::size_t i = 0; i < rows; ++i) {
                    for (std::size_t j = 0; j < ca; ++j) ga.at(i, j) = g.at(i, j);
                    for (std::size_t j = 0; j < cb; ++j) gb.at(i, j) = g.at(i, ca + j);
                }
            } else {
                std::size_t na = av.numel();
                for (std::size_t i = 0; i < na; ++i) ga.values[i] = g.values[i];
                for (std::size_t i = 0; i < bv.numel(); ++i) gb.values[i] = g.values[na + i];
            }
            t.add_grad(ia, ga);
            t.add_grad(ib, gb);
        };
    return push(std::move(r));
}

Node Tape::slice_cols(Node a, std::size_t c0, std::size_t c1) {
    const Rec& ra = rec(a);
    if (c0 >= c1 || c1 > ra.value.cols())
        throw std::invalid_argument("slice_cols: bad column range");
    Rec r;
    std::size_t rows = ra.value.rows(), w = c1 - c0;
    if (ra.value.rank() == 2) {
        r.value = Signal::zeros({rows, w});
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < w; ++j) r.value.at(i, j) = ra.value.at(i, c0 + j);
    } else {
        r.value = Signal::zeros({w});
        for (std::size_t j = 0; j < w; ++j) r.value.values[j] = ra.value.values[c0 + j];
    }
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia, c0, w, rows](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            Signal ga = Signal::zeros(av.shape);
            if (av.rank() == 2) {
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < w; ++j) ga.at(i, c0 + j) = g.at(i, j);
            } else {
                for (std::size_t j = 0; j < w; ++j) ga.values[c0 + j] = g.values[j];
            }
            t.add_grad(ia, ga);
        };
    return push(std::move(r));
}

Node Tape::sum(Node a) {
    const Rec& ra = rec(a);
    double s = 0.0;
    for (double v : ra.value.values) s += v;
    Rec r;
    r.value = Signal::scalar(s);
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            t.add_grad(ia, Signal::full(av.shape, g.values[0]));
        };
    return push(std::move(r));
}

Node Tape::mean(Node a) {
    const Rec& ra = rec(a);
    Rec r;
    r.value = Signal::scalar(mean_value(ra.value));
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    std::size_t n = ra.value.numel();
    if (r.requires_grad)
        r.back = [ia, n](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            t.add_grad(ia, Signal::full(av.shape, g.values[0] / static_cast<double>(n)));
        };
    return push(std::move(r));
}

Node Tape::l1(Node a) {
    const Rec& ra = rec(a);
    double s = 0.0;
    for (double v : ra.value.values) s += std::fabs(v);
    std::size_t n = ra.value.numel();
    Rec r;
    r.value = Signal::scalar(s / static_cast<double>(n));
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia, n](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            Signal ga = Signal::zeros(av.shape);
            double c = g.values[0] / static_cast<double>(n);
            for (std::size_t i = 0; i < av.numel(); ++i) {
                double v = av.values[i];
                ga.values[i] = v > 0.0 ? c : (v < 0.0 ? -c : 0.0);
            }
            t.add_grad(ia, ga);
        };
    return push(std::move(r));
}

Node Tape::l2(Node a) {
    const Rec& ra = rec(a);
    double s = 0.0;
    for (double v : ra.value.values) s += v * v;
    std::size_t n = ra.value.numel();
    Rec r;
    r.value = Signal::scalar(s / static_cast<double>(n));
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia, n](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            Signal ga = Signal::zeros(av.shape);
            double c = 2.0 * g.values[0] / static_cast<double>(n);
            for (std::size_t i = 0; i < av.numel(); ++i) ga.values[i] = c * av.values[i];
            t.add_grad(ia, ga);
        };
    return push(std::move(r));
}

Node Tape::custom_unary(Node a, std::function<double(double)> f,
                        std::function<double(double)> df) {
    const Rec& ra = rec(a);
    Rec r;
    r.value = ra.value;
    for (double& v : r.value.values) v = f(v);
    r.requires_grad = ra.requires_grad;
    int ia = a.id_;
    if (r.requires_grad)
        r.back = [ia, df](Tape& t, const Signal& g) {
            const Signal& av = t.recs_[static_cast<std::size_t>(ia)].value;
            Signal ga = g;
            for (std::size_t i = 0; i < ga.numel(); ++i) ga.values[i] *= df(av.values[i]);
            t.add_grad(ia, ga);
        };
    return push(std::move(r));
}

GradMap Tape::backward(Node loss) {
    if (used_) throw std::runtime_error("backward: tape already backpropagated");
    Rec& lr = rec(loss);
    if (lr.value.numel() != 1) throw std::invalid_argument("backward: loss must be scalar");
    used_ = true;

    lr.grad = Signal::scalar(1.0);
    lr.has_grad = true;
    for (int i = loss.id_; i >= 0; --i) {
        Rec& r = recs_[static_cast<std::size_t>(i)];
        if (r.has_grad && r.back) r.back(*this, r.grad);
    }

    GradMap out;
    for (int id : named_leaves_) {
        Rec& r = recs_[static_cast<std::size_t>(id)];
        out[r.name] = r.has_grad ? r.grad : Signal::zeros(r.value.shape);
    }
    return out;
}

GradCheckReport grad_check(const ScalarFn& f, const LeafSet& theta, double tol, Rng& rng,
                           std::size_t max_coords) {
    Tape tape;
    std::unordered_map<std::string, Node> nodes;
    for (const auto& [name, sig] : theta) nodes[name] = tape.leaf(sig, name);
    GradMap grads = tape.backward(f(tape, nodes));

    std::size_t total = 0;
    for (const auto& [name, sig] : theta) total += sig.numel();
    if (total == 0) throw std::invalid_argument("grad_check: no parameters");

    // flat coordinate index -> (block, element)
    auto locate = [&](std::size_t flat) {
        for (std::size_t b = 0; b < theta.size(); ++b) {
            if (flat < theta[b].second.numel()) return std::make_pair(b, flat);
            flat -= theta[b].second.numel();
        }
        throw std::logic_error("grad_check: coordinate out of range");
    };

    std::vector<std::size_t> picks;
    if (total <= max_coords) {
        picks.resize(total);
        for (std::size_t i = 0; i < total; ++i) picks[i] = i;
    } else {
        picks.resize(max_coords);
        for (std::size_t i = 0; i < max_coords; ++i)
            picks[i] = static_cast<std::size_t>(rng.next_u64() % total);
    }

    LeafSet work = theta;
    auto eval = [&]() {
        Tape t2;
        std::unordered_map<std::string, Node> n2;
        for (const auto& [name, sig] : work) n2[name] = t2.leaf(sig, name);
        Node l = f(t2, n2);
        return l.value().values[0];
    };

    const double h = 1e-5;
    GradCheckReport report;
    report.coords_checked = picks.size();
    for (std::size_t flat : picks) {
        auto [b, elem] = locate(flat);
        double saved = work[b].second.values[elem];
        work[b].second.values[elem] = saved + h;
        double fp = eval();
        work[b].second.values[elem] = saved - h;
        double fm = eval();
        work[b].second.values[elem] = saved;

        double fd = (fp - fm) / (2.0 * h);
        double adg = grads.at(work[b].first).values[elem];
        double rel = std::fabs(fd - adg) / std::max({1.0, std::fabs(fd), std::fabs(adg)});
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_param = work[b].first;
        }
    }
    report.pass = report.max_rel_err <= tol;
    return report;
}

}  // namespace blurdm::ad
