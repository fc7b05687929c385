#include "fgda/ops.hpp"

#include <algorithm>
#include <cmath>

#include "fgda/errors.hpp"

namespace fgda {

namespace {

void require_rank2(const Tensor& t, const char* op) {
    if (t.rank() != 2) throw ShapeError(std::string(op) + " expects a rank-2 tensor, got " + shape_str(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
}

} // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
        throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
    }
    const std::size_t r = a.rows(), k = a.cols(), c = b.cols();
    auto av = a.values();
    auto bv = b.values();
    std::vector<double> out(r * c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            for (std::size_t j = 0; j < c; ++j) out[i * c + j] += aip * bv[p * c + j];
        }
    }
    return Tensor::make_result({r, c}, std::move(out), {a, b},
                               [a, b, r, k, c](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   auto av = a.values();
                                   auto bv = b.values();
                                   if (auto* ga = pg[0]) {
                                       // dA = G * B^T
                                       for (std::size_t i = 0; i < r; ++i)
                                           for (std::size_t p = 0; p < k; ++p) {
                                               double acc = 0.0;
                                               for (std::size_t j = 0; j < c; ++j) acc += g[i * c + j] * bv[p * c + j];
                                               (*ga)[i * k + p] += acc;
                                           }
                                   }
                                   if (auto* gb = pg[1]) {
                                       // dB = A^T * G
                                       for (std::size_t i = 0; i < r; ++i)
                                           for (std::size_t p = 0; p < k; ++p) {
                                               const double aip = av[i * k + p];
                                               for (std::size_t j = 0; j < c; ++j) (*gb)[p * c + j] += aip * g[i * c + j];
                                           }
                                   }
                               });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
    require_rank2(x, "add_bias");
    const std::size_t r = x.rows(), c = x.cols();
    if (bias.size() != c) {
        throw ShapeError("add_bias: bias " + shape_str(bias.shape()) + " does not fit " + shape_str(x.shape()));
    }
    auto xv = x.values();
    auto bv = bias.values();
    std::vector<double> out(xv.begin(), xv.end());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] += bv[j];
    return Tensor::make_result(x.shape(), std::move(out), {x, bias},
                               [r, c](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   if (auto* gx = pg[0])
                                       for (std::size_t i = 0; i < r * c; ++i) (*gx)[i] += g[i];
                                   if (auto* gb = pg[1])
                                       for (std::size_t i = 0; i < r; ++i)
                                           for (std::size_t j = 0; j < c; ++j) (*gb)[j] += g[i * c + j];
                               });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    auto av = a.values();
    auto bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b},
                               [](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   for (auto* buf : pg)
                                       if (buf)
                                           for (std::size_t i = 0; i < g.size(); ++i) (*buf)[i] += g[i];
                               });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    auto av = a.values();
    auto bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b},
                               [](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   if (auto* ga = pg[0])
                                       for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
                                   if (auto* gb = pg[1])
                                       for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
                               });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    auto av = a.values();
    auto bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b},
                               [a, b](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   auto av = a.values();
                                   auto bv = b.values();
                                   if (auto* ga = pg[0])
                                       for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * bv[i];
                                   if (auto* gb = pg[1])
                                       for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * av[i];
                               });
}

Tensor scale(const Tensor& x, double factor) {
    auto xv = x.values();
    std::vector<double> out(xv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * factor;
    return Tensor::make_result(x.shape(), std::move(out), {x},
                               [factor](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   if (auto* gx = pg[0])
                                       for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * factor;
                               });
}

Tensor leaky_relu(const Tensor& x, double slope) {
    if (!(slope >= 0.0 && slope < 1.0)) throw ParameterError("leaky_relu slope must lie in [0, 1)");
    auto xv = x.values();
    std::vector<double> out(xv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : slope * xv[i];
    return Tensor::make_result(x.shape(), std::move(out), {x},
                               [x, slope](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   auto xv = x.values();
                                   if (auto* gx = pg[0])
                                       for (std::size_t i = 0; i < g.size(); ++i)
                                           (*gx)[i] += xv[i] > 0.0 ? g[i] : slope * g[i];
                               });
}

Tensor softmax_t(const Tensor& z, double temperature) {
    if (!(temperature > 0.0)) throw ParameterError("softmax temperature must be positive");
    const std::size_t r = z.rows(), c = z.cols();
    auto zv = z.values();
    std::vector<double> out(zv.size());
    for (std::size_t i = 0; i < r; ++i) {
        const double* row = zv.data() + i * c;
        const double top = *std::max_element(row, row + c);
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            out[i * c + j] = std::exp((row[j] - top) / temperature);
            total += out[i * c + j];
        }
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= total;
    }
    auto probs = std::make_shared<std::vector<double>>(out);
    return Tensor::make_result(z.shape(), std::move(out), {z},
                               [probs, r, c, temperature](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   auto* gz = pg[0];
                                   if (!gz) return;
                                   const auto& p = *probs;
                                   // dz_j = p_j (g_j - sum_k g_k p_k) / T
                                   for (std::size_t i = 0; i < r; ++i) {
                                       double dot = 0.0;
                                       for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * p[i * c + j];
                                       for (std::size_t j = 0; j < c; ++j)
                                           (*gz)[i * c + j] += p[i * c + j] * (g[i * c + j] - dot) / temperature;
                                   }
                               });
}

Tensor log_clamped(const Tensor& x, double floor) {
    auto xv = x.values();
    std::vector<double> out(xv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(xv[i], floor));
    return Tensor::make_result(x.shape(), std::move(out), {x},
                               [x, floor](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   auto xv = x.values();
                                   if (auto* gx = pg[0])
                                       for (std::size_t i = 0; i < g.size(); ++i)
                                           if (xv[i] > floor) (*gx)[i] += g[i] / xv[i];
                               });
}

Tensor sum(const Tensor& x) {
    double total = 0.0;
    for (double v : x.values()) total += v;
    return Tensor::make_result({1}, {total}, {x}, [](std::span<const double> g, std::span<std::vector<double>*> pg) {
        if (auto* gx = pg[0])
            for (auto& v : *gx) v += g[0];
    });
}

Tensor row_sum(const Tensor& x) {
    const std::size_t r = x.rows(), c = x.cols();
    auto xv = x.values();
    std::vector<double> out(r, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[i] += xv[i * c + j];
    return Tensor::make_result({r, 1}, std::move(out), {x},
                               [r, c](std::span<const double> g, std::span<std::vector<double>*> pg) {
                                   if (auto* gx = pg[0])
                                       for (std::size_t i = 0; i < r; ++i)
                                           for (std::size_t j = 0; j < c; ++j) (*gx)[i * c + j] += g[i];
                               });
}

} // namespace fgda
