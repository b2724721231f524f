#include "rignn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rignn/kernels.hpp"

namespace rignn::ad {
namespace {

Array as_2d(const Array& a) {
    if (a.shape.size() == 2) return a;
    Array out = a;
    if (a.shape.empty())
        out.shape = {1, 1};
    else if (a.shape.size() == 1)
        out.shape = {1, a.shape[0]};
    else
        throw std::invalid_argument("tape supports rank <= 2, got " +
                                    Array::shape_str(a.shape));
    return out;
}

Array transposed(const Array& a) {
    Array out({a.shape[1], a.shape[0]});
    for (std::size_t i = 0; i < a.shape[0]; ++i)
        for (std::size_t j = 0; j < a.shape[1]; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace

NodeId Tape::push(Array value, std::function<void()> backprop) {
    value.check_finite("tape op result");
    Node n;
    n.grad = Array(value.shape);
    n.value = std::move(value);
    n.backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::leaf(const Array& value) { return push(as_2d(value), {}); }

double Tape::scalar_value(NodeId id) const {
    require(nodes_[id].value.size() == 1, "scalar_value on non-scalar node");
    return nodes_[id].value.data[0];
}

void Tape::check_2d(NodeId id, const char* op) const {
    require(id >= 0 && id < static_cast<NodeId>(nodes_.size()),
            std::string(op) + ": bad node id");
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    check_2d(a, "matmul");
    check_2d(b, "matmul");
    const Array& A = nodes_[a].value;
    const Array& B = nodes_[b].value;
    require(A.shape[1] == B.shape[0],
            "matmul shape mismatch " + Array::shape_str(A.shape) + " x " +
                Array::shape_str(B.shape));
    Array C({A.shape[0], B.shape[1]});
    kernels::active().matmul_acc(A.shape[0], A.shape[1], B.shape[1], A.data.data(),
                                 B.data.data(), C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, b, out] {
        const Array& dC = nodes_[out].grad;
        const Array& A = nodes_[a].value;
        const Array& B = nodes_[b].value;
        // dA += dC * B^T, dB += A^T * dC
        Array bt = transposed(B);
        kernels::active().matmul_acc(dC.shape[0], dC.shape[1], bt.shape[1],
                                     dC.data.data(), bt.data.data(),
                                     nodes_[a].grad.data.data());
        Array at = transposed(A);
        kernels::active().matmul_acc(at.shape[0], at.shape[1], dC.shape[1],
                                     at.data.data(), dC.data.data(),
                                     nodes_[b].grad.data.data());
    };
    return out;
}

NodeId Tape::matmul_nt(NodeId a, NodeId b) {
    const Array& A = nodes_[a].value;
    const Array& B = nodes_[b].value;
    require(A.shape[1] == B.shape[1],
            "matmul_nt shape mismatch " + Array::shape_str(A.shape) + " x " +
                Array::shape_str(B.shape) + "^T");
    Array C({A.shape[0], B.shape[0]});
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < A.shape[0]; ++i)
        for (std::size_t j = 0; j < B.shape[0]; ++j)
            C.at(i, j) = k.dot(A.shape[1], &A.data[i * A.shape[1]],
                               &B.data[j * B.shape[1]]);
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, b, out] {
        const Array& dC = nodes_[out].grad;
        const Array& A = nodes_[a].value;
        const Array& B = nodes_[b].value;
        // dA += dC * B, dB += dC^T * A
        kernels::active().matmul_acc(dC.shape[0], dC.shape[1], B.shape[1],
                                     dC.data.data(), B.data.data(),
                                     nodes_[a].grad.data.data());
        Array dct = transposed(dC);
        kernels::active().matmul_acc(dct.shape[0], dct.shape[1], A.shape[1],
                                     dct.data.data(), A.data.data(),
                                     nodes_[b].grad.data.data());
    };
    return out;
}

NodeId Tape::add(NodeId a, NodeId b) {
    const Array& A = nodes_[a].value;
    const Array& B = nodes_[b].value;
    require(A.shape == B.shape, "add shape mismatch " + Array::shape_str(A.shape) +
                                    " vs " + Array::shape_str(B.shape));
    Array C(A.shape);
    kernels::active().vadd(A.size(), A.data.data(), B.data.data(), C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, b, out] {
        const Array& d = nodes_[out].grad;
        kernels::active().axpy(d.size(), 1.0, d.data.data(),
                               nodes_[a].grad.data.data());
        kernels::active().axpy(d.size(), 1.0, d.data.data(),
                               nodes_[b].grad.data.data());
    };
    return out;
}

NodeId Tape::add_rowvec(NodeId a, NodeId v) {
    const Array& A = nodes_[a].value;
    const Array& V = nodes_[v].value;
    require(V.shape[0] == 1 && V.shape[1] == A.shape[1],
            "add_rowvec shape mismatch " + Array::shape_str(A.shape) + " + " +
                Array::shape_str(V.shape));
    Array C(A.shape);
    for (std::size_t i = 0; i < A.shape[0]; ++i)
        kernels::active().vadd(A.shape[1], &A.data[i * A.shape[1]], V.data.data(),
                               &C.data[i * A.shape[1]]);
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, v, out] {
        const Array& d = nodes_[out].grad;
        kernels::active().axpy(d.size(), 1.0, d.data.data(),
                               nodes_[a].grad.data.data());
        for (std::size_t i = 0; i < d.shape[0]; ++i)
            kernels::active().axpy(d.shape[1], 1.0, &d.data[i * d.shape[1]],
                                   nodes_[v].grad.data.data());
    };
    return out;
}

NodeId Tape::sub(NodeId a, NodeId b) { return add(a, scale(b, -1.0)); }

NodeId Tape::mul(NodeId a, NodeId b) {
    const Array& A = nodes_[a].value;
    const Array& B = nodes_[b].value;
    require(A.shape == B.shape, "mul shape mismatch " + Array::shape_str(A.shape) +
                                    " vs " + Array::shape_str(B.shape));
    Array C(A.shape);
    kernels::active().vmul(A.size(), A.data.data(), B.data.data(), C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, b, out] {
        const Array& d = nodes_[out].grad;
        const Array& A = nodes_[a].value;
        const Array& B = nodes_[b].value;
        Array& ga = nodes_[a].grad;
        Array& gb = nodes_[b].grad;
        for (std::size_t i = 0; i < d.size(); ++i) {
            ga.data[i] += d.data[i] * B.data[i];
            gb.data[i] += d.data[i] * A.data[i];
        }
    };
    return out;
}

NodeId Tape::scale(NodeId a, double c) {
    const Array& A = nodes_[a].value;
    Array C(A.shape);
    kernels::active().vscale(A.size(), c, A.data.data(), C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, c, out] {
        const Array& d = nodes_[out].grad;
        kernels::active().axpy(d.size(), c, d.data.data(),
                               nodes_[a].grad.data.data());
    };
    return out;
}

NodeId Tape::mul_scalar(NodeId a, NodeId s) {
    require(nodes_[s].value.size() == 1, "mul_scalar: s must be 1x1");
    const Array& A = nodes_[a].value;
    const double sv = nodes_[s].value.data[0];
    Array C(A.shape);
    kernels::active().vscale(A.size(), sv, A.data.data(), C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, s, out] {
        const Array& d = nodes_[out].grad;
        const double sv = nodes_[s].value.data[0];
        kernels::active().axpy(d.size(), sv, d.data.data(),
                               nodes_[a].grad.data.data());
        nodes_[s].grad.data[0] +=
            kernels::active().dot(d.size(), d.data.data(), nodes_[a].value.data.data());
    };
    return out;
}

NodeId Tape::sigmoid(NodeId a) {
    const Array& A = nodes_[a].value;
    Array C(A.shape);
    for (std::size_t i = 0; i < A.size(); ++i)
        C.data[i] = 1.0 / (1.0 + std::exp(-A.data[i]));
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, out] {
        const Array& d = nodes_[out].grad;
        const Array& y = nodes_[out].value;
        Array& g = nodes_[a].grad;
        for (std::size_t i = 0; i < d.size(); ++i)
            g.data[i] += d.data[i] * y.data[i] * (1.0 - y.data[i]);
    };
    return out;
}

NodeId Tape::tanh_(NodeId a) {
    const Array& A = nodes_[a].value;
    Array C(A.shape);
    for (std::size_t i = 0; i < A.size(); ++i) C.data[i] = std::tanh(A.data[i]);
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, out] {
        const Array& d = nodes_[out].grad;
        const Array& y = nodes_[out].value;
        Array& g = nodes_[a].grad;
        for (std::size_t i = 0; i < d.size(); ++i)
            g.data[i] += d.data[i] * (1.0 - y.data[i] * y.data[i]);
    };
    return out;
}

NodeId Tape::softmax_rows(NodeId a) {
    const Array& A = nodes_[a].value;
    Array C(A.shape);
    const std::size_t r = A.shape[0], c = A.shape[1];
    for (std::size_t i = 0; i < r; ++i) {
        const double* x = &A.data[i * c];
        double* y = &C.data[i * c];
        double mx = x[0];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, x[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            y[j] = std::exp(x[j] - mx);
            z += y[j];
        }
        for (std::size_t j = 0; j < c; ++j) y[j] /= z;
    }
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, out] {
        const Array& d = nodes_[out].grad;
        const Array& y = nodes_[out].value;
        Array& g = nodes_[a].grad;
        const std::size_t r = d.shape[0], c = d.shape[1];
        for (std::size_t i = 0; i < r; ++i) {
            const double* dy = &d.data[i * c];
            const double* yy = &y.data[i * c];
            const double s = kernels::active().dot(c, dy, yy);
            for (std::size_t j = 0; j < c; ++j)
                g.data[i * c + j] += yy[j] * (dy[j] - s);
        }
    };
    return out;
}

NodeId Tape::mean_rows(NodeId a) {
    const Array& A = nodes_[a].value;
    const std::size_t r = A.shape[0], c = A.shape[1];
    Array C({1, c});
    for (std::size_t i = 0; i < r; ++i)
        kernels::active().axpy(c, 1.0 / static_cast<double>(r), &A.data[i * c],
                               C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, out, r, c] {
        const Array& d = nodes_[out].grad;
        for (std::size_t i = 0; i < r; ++i)
            kernels::active().axpy(c, 1.0 / static_cast<double>(r), d.data.data(),
                                   &nodes_[a].grad.data[i * c]);
    };
    return out;
}

NodeId Tape::sum(NodeId a) {
    const Array& A = nodes_[a].value;
    double s = 0.0;
    for (double v : A.data) s += v;
    NodeId out = push(Array({1, 1}, {s}), {});
    nodes_[out].backprop = [this, a, out] {
        const double d = nodes_[out].grad.data[0];
        Array& g = nodes_[a].grad;
        for (auto& v : g.data) v += d;
    };
    return out;
}

NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
    require(!parts.empty(), "concat_cols: empty");
    const std::size_t r = nodes_[parts[0]].value.shape[0];
    std::size_t c = 0;
    for (NodeId p : parts) {
        require(nodes_[p].value.shape[0] == r, "concat_cols: row mismatch");
        c += nodes_[p].value.shape[1];
    }
    Array C({r, c});
    std::size_t off = 0;
    for (NodeId p : parts) {
        const Array& P = nodes_[p].value;
        for (std::size_t i = 0; i < r; ++i)
            std::copy(P.data.begin() + i * P.shape[1],
                      P.data.begin() + (i + 1) * P.shape[1],
                      C.data.begin() + i * c + off);
        off += P.shape[1];
    }
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, parts, out, r, c] {
        const Array& d = nodes_[out].grad;
        std::size_t off = 0;
        for (NodeId p : parts) {
            Array& g = nodes_[p].grad;
            const std::size_t pc = g.shape[1];
            for (std::size_t i = 0; i < r; ++i)
                kernels::active().axpy(pc, 1.0, &d.data[i * c + off],
                                       &g.data[i * pc]);
            off += pc;
        }
    };
    return out;
}

NodeId Tape::concat_rows(const std::vector<NodeId>& parts) {
    require(!parts.empty(), "concat_rows: empty");
    const std::size_t c = nodes_[parts[0]].value.shape[1];
    std::size_t r = 0;
    for (NodeId p : parts) {
        require(nodes_[p].value.shape[1] == c, "concat_rows: col mismatch");
        r += nodes_[p].value.shape[0];
    }
    Array C({r, c});
    std::size_t off = 0;
    for (NodeId p : parts) {
        const Array& P = nodes_[p].value;
        std::copy(P.data.begin(), P.data.end(), C.data.begin() + off);
        off += P.size();
    }
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, parts, out] {
        const Array& d = nodes_[out].grad;
        std::size_t off = 0;
        for (NodeId p : parts) {
            Array& g = nodes_[p].grad;
            kernels::active().axpy(g.size(), 1.0, &d.data[off], g.data.data());
            off += g.size();
        }
    };
    return out;
}

NodeId Tape::stack_scalars(const std::vector<NodeId>& scalars) {
    require(!scalars.empty(), "stack_scalars: empty");
    Array C({1, scalars.size()});
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        require(nodes_[scalars[i]].value.size() == 1, "stack_scalars: non-scalar");
        C.data[i] = nodes_[scalars[i]].value.data[0];
    }
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, scalars, out] {
        const Array& d = nodes_[out].grad;
        for (std::size_t i = 0; i < scalars.size(); ++i)
            nodes_[scalars[i]].grad.data[0] += d.data[i];
    };
    return out;
}

NodeId Tape::gather_rows(NodeId a, std::vector<std::size_t> idx) {
    const Array& A = nodes_[a].value;
    const std::size_t c = A.shape[1];
    Array C({idx.size(), c});
    for (std::size_t i = 0; i < idx.size(); ++i) {
        require(idx[i] < A.shape[0], "gather_rows: index out of range");
        std::copy(A.data.begin() + idx[i] * c, A.data.begin() + (idx[i] + 1) * c,
                  C.data.begin() + i * c);
    }
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, idx = std::move(idx), out, c] {
        const Array& d = nodes_[out].grad;
        Array& g = nodes_[a].grad;
        for (std::size_t i = 0; i < idx.size(); ++i)
            kernels::active().axpy(c, 1.0, &d.data[i * c], &g.data[idx[i] * c]);
    };
    return out;
}

NodeId Tape::row(NodeId a, std::size_t i) { return gather_rows(a, {i}); }

NodeId Tape::slice_cols(NodeId a, std::size_t start, std::size_t len) {
    const Array& A = nodes_[a].value;
    require(start + len <= A.shape[1], "slice_cols: out of range");
    const std::size_t r = A.shape[0], c = A.shape[1];
    Array C({r, len});
    for (std::size_t i = 0; i < r; ++i)
        std::copy(A.data.begin() + i * c + start, A.data.begin() + i * c + start + len,
                  C.data.begin() + i * len);
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, out, start, len, r, c] {
        const Array& d = nodes_[out].grad;
        Array& g = nodes_[a].grad;
        for (std::size_t i = 0; i < r; ++i)
            kernels::active().axpy(len, 1.0, &d.data[i * len],
                                   &g.data[i * c + start]);
    };
    return out;
}

NodeId Tape::cosine(NodeId u, NodeId v) {
    const Array& U = nodes_[u].value;
    const Array& V = nodes_[v].value;
    require(U.shape == V.shape && U.shape[0] == 1, "cosine: want matching 1xn");
    const std::size_t n = U.shape[1];
    const auto& k = kernels::active();
    const double uu = k.dot(n, U.data.data(), U.data.data());
    const double vv = k.dot(n, V.data.data(), V.data.data());
    const double uv = k.dot(n, U.data.data(), V.data.data());
    const bool degenerate = (uu == 0.0 || vv == 0.0);
    const double nu = std::sqrt(uu), nv = std::sqrt(vv);
    const double c = degenerate ? 0.0 : uv / (nu * nv);
    NodeId out = push(Array({1, 1}, {c}), {});
    if (!degenerate) {
        nodes_[out].backprop = [this, u, v, out, nu, nv, c, n] {
            const double d = nodes_[out].grad.data[0];
            const Array& U = nodes_[u].value;
            const Array& V = nodes_[v].value;
            Array& gu = nodes_[u].grad;
            Array& gv = nodes_[v].grad;
            for (std::size_t i = 0; i < n; ++i) {
                gu.data[i] += d * (V.data[i] / (nu * nv) - c * U.data[i] / (nu * nu));
                gv.data[i] += d * (U.data[i] / (nu * nv) - c * V.data[i] / (nv * nv));
            }
        };
    }
    return out;
}

NodeId Tape::dropout(NodeId a, double p, bool train, Rng& rng) {
    require(p >= 0.0 && p < 1.0, "dropout: p must be in [0,1)");
    if (!train || p == 0.0) return a;
    const Array& A = nodes_[a].value;
    const double keep = 1.0 - p;
    Array mask(A.shape);
    for (auto& m : mask.data) m = (rng.next_double() < keep) ? 1.0 / keep : 0.0;
    Array C(A.shape);
    kernels::active().vmul(A.size(), A.data.data(), mask.data.data(),
                           C.data.data());
    NodeId out = push(std::move(C), {});
    nodes_[out].backprop = [this, a, out, mask = std::move(mask)] {
        const Array& d = nodes_[out].grad;
        Array& g = nodes_[a].grad;
        for (std::size_t i = 0; i < d.size(); ++i)
            g.data[i] += d.data[i] * mask.data[i];
    };
    return out;
}

NodeId Tape::neg_log_pick(NodeId a, std::size_t i, double floor,
                          std::size_t* clamp_count) {
    const Array& A = nodes_[a].value;
    require(i < A.size(), "neg_log_pick: index out of range");
    double p = A.data[i];
    bool clamped = p < floor;
    if (clamped) {
        p = floor;
        if (clamp_count) ++*clamp_count;
    }
    NodeId out = push(Array({1, 1}, {-std::log(p)}), {});
    nodes_[out].backprop = [this, a, i, out, p, clamped] {
        if (clamped) return;  // flat region below the floor
        nodes_[a].grad.data[i] += nodes_[out].grad.data[0] * (-1.0 / p);
    };
    return out;
}

void Tape::backward(NodeId output) {
    require(nodes_[output].value.size() == 1, "backward: output must be scalar");
    nodes_[output].grad.data[0] = 1.0;
    for (NodeId id = output; id >= 0; --id)
        if (nodes_[id].backprop) nodes_[id].backprop();
}

FdReport fd_check(const std::function<double()>& loss,
                  const std::vector<ParamView>& params, double eps,
                  std::size_t samples_per_param, Rng& rng) {
    if (eps <= 0.0) throw std::invalid_argument("fd_check: eps must be > 0");
    FdReport report;
    for (const auto& p : params) {
        FdEntry entry{p.name, 0.0};
        const std::size_t n = p.value->size();
        std::vector<std::size_t> picks;
        if (samples_per_param == 0 || samples_per_param >= n) {
            picks.resize(n);
            for (std::size_t i = 0; i < n; ++i) picks[i] = i;
        } else {
            for (std::size_t s = 0; s < samples_per_param; ++s)
                picks.push_back(static_cast<std::size_t>(rng.next_below(n)));
        }
        for (std::size_t i : picks) {
            const double orig = p.value->data[i];
            p.value->data[i] = orig + eps;
            const double up = loss();
            p.value->data[i] = orig - eps;
            const double down = loss();
            p.value->data[i] = orig;
            const double fd = (up - down) / (2.0 * eps);
            const double an = p.grad->data[i];
            const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
            entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(fd - an) / denom);
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace rignn::ad
