#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mgan/conv.hpp"
#include "mgan/tensor.hpp"

namespace mgan {

enum class Activation { relu, sigmoid };

namespace detail {

// Region a of an extent split into `grid` as-even-as-possible parts covers
// [floor(a*extent/grid), floor((a+1)*extent/grid)).
inline std::pair<std::int64_t, std::int64_t> region_bounds(std::int64_t extent, std::int64_t grid,
                                                           std::int64_t idx) {
    return {idx * extent / grid, (idx + 1) * extent / grid};
}

template <typename T>
void require_rank4(const Tensor<T>& t, const char* op) {
    if (t.rank() != 4) {
        throw ShapeError(std::string(op) + " expects a 4-D NCHW tensor, got " +
                         shape_str(t.shape()));
    }
}

}  // namespace detail

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Activation kind, Tape<T>* tape = nullptr) {
    Tensor<T> y = Tensor<T>::zeros(x.shape());
    const T* in = x.data();
    T* out = y.data();
    const std::int64_t n = x.numel();
    if (kind == Activation::relu) {
        for (std::int64_t i = 0; i < n; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
    } else {
        for (std::int64_t i = 0; i < n; ++i) out[i] = T(1) / (T(1) + std::exp(-in[i]));
    }
    debug_check_finite(y, "activation");
    if (tape) {
        Tensor<T> xi = x, yi = y;
        tape->record([xi, yi, kind, n]() mutable {
            yi.ensure_grad();
            xi.ensure_grad();
            const T* dy = yi.grad().data();
            T* dx = xi.grad().data();
            if (kind == Activation::relu) {
                const T* v = xi.data();
                for (std::int64_t i = 0; i < n; ++i)
                    if (v[i] > T(0)) dx[i] += dy[i];
            } else {
                const T* v = yi.data();
                for (std::int64_t i = 0; i < n; ++i) dx[i] += dy[i] * v[i] * (T(1) - v[i]);
            }
        });
    }
    return y;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x, Tape<T>* tape = nullptr) {
    return activation(x, Activation::relu, tape);
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x, Tape<T>* tape = nullptr) {
    return activation(x, Activation::sigmoid, tape);
}

// Mean over each of the grid x grid regions of every channel plane.
// grid == 1 is the global average pool; grid == H == W returns the input.
template <typename T>
Tensor<T> region_avg_pool(const Tensor<T>& x, std::int64_t grid, Tape<T>* tape = nullptr) {
    detail::require_rank4(x, "region_avg_pool");
    const std::int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (grid < 1 || grid > H || grid > W) {
        throw ShapeError("region_avg_pool grid " + std::to_string(grid) +
                         " does not fit spatial extents " + shape_str(x.shape()));
    }
    Tensor<T> y = Tensor<T>::zeros({N, C, grid, grid});
    const T* in = x.data();
    T* out = y.data();
    for (std::int64_t nc = 0; nc < N * C; ++nc) {
        const T* plane = in + nc * H * W;
        T* orow = out + nc * grid * grid;
        for (std::int64_t a = 0; a < grid; ++a) {
            auto [i0, i1] = detail::region_bounds(H, grid, a);
            for (std::int64_t b = 0; b < grid; ++b) {
                auto [j0, j1] = detail::region_bounds(W, grid, b);
                T acc = T(0);
                for (std::int64_t i = i0; i < i1; ++i)
                    for (std::int64_t j = j0; j < j1; ++j) acc += plane[i * W + j];
                orow[a * grid + b] = acc / static_cast<T>((i1 - i0) * (j1 - j0));
            }
        }
    }
    if (tape) {
        Tensor<T> xi = x, yi = y;
        tape->record([xi, yi, N, C, H, W, grid]() mutable {
            yi.ensure_grad();
            xi.ensure_grad();
            const T* dy = yi.grad().data();
            T* dx = xi.grad().data();
            for (std::int64_t nc = 0; nc < N * C; ++nc) {
                T* plane = dx + nc * H * W;
                const T* grow = dy + nc * grid * grid;
                for (std::int64_t a = 0; a < grid; ++a) {
                    auto [i0, i1] = detail::region_bounds(H, grid, a);
                    for (std::int64_t b = 0; b < grid; ++b) {
                        auto [j0, j1] = detail::region_bounds(W, grid, b);
                        const T g = grow[a * grid + b] / static_cast<T>((i1 - i0) * (j1 - j0));
                        for (std::int64_t i = i0; i < i1; ++i)
                            for (std::int64_t j = j0; j < j1; ++j) plane[i * W + j] += g;
                    }
                }
            }
        });
    }
    return y;
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x, Tape<T>* tape = nullptr) {
    return region_avg_pool(x, 1, tape);
}

// Multiplies every pixel of region (a,b) in channel k by alpha[n,k,a,b].
// alpha has shape [N,C,S,S] under the same partition rule as region_avg_pool.
template <typename T>
Tensor<T> scale_regions(const Tensor<T>& x, const Tensor<T>& alpha, Tape<T>* tape = nullptr) {
    detail::require_rank4(x, "scale_regions");
    detail::require_rank4(alpha, "scale_regions");
    const std::int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const std::int64_t S = alpha.dim(2);
    if (alpha.dim(0) != N || alpha.dim(1) != C || alpha.dim(3) != S || S < 1 || S > H || S > W) {
        throw ShapeError("scale_regions weight grid " + shape_str(alpha.shape()) +
                         " does not match features " + shape_str(x.shape()));
    }
    // Pixel -> region lookup, shared by forward and backward.
    std::vector<std::int64_t> row_region(static_cast<std::size_t>(H));
    std::vector<std::int64_t> col_region(static_cast<std::size_t>(W));
    for (std::int64_t a = 0; a < S; ++a) {
        auto [i0, i1] = detail::region_bounds(H, S, a);
        for (std::int64_t i = i0; i < i1; ++i) row_region[static_cast<std::size_t>(i)] = a;
        auto [j0, j1] = detail::region_bounds(W, S, a);
        for (std::int64_t j = j0; j < j1; ++j) col_region[static_cast<std::size_t>(j)] = a;
    }
    Tensor<T> y = Tensor<T>::zeros(x.shape());
    {
        const T* in = x.data();
        const T* al = alpha.data();
        T* out = y.data();
        for (std::int64_t nc = 0; nc < N * C; ++nc) {
            const T* plane = in + nc * H * W;
            const T* agrid = al + nc * S * S;
            T* oplane = out + nc * H * W;
            for (std::int64_t i = 0; i < H; ++i) {
                const T* arow = agrid + row_region[static_cast<std::size_t>(i)] * S;
                for (std::int64_t j = 0; j < W; ++j)
                    oplane[i * W + j] =
                        plane[i * W + j] * arow[col_region[static_cast<std::size_t>(j)]];
            }
        }
    }
    if (tape) {
        Tensor<T> xi = x, ai = alpha, yi = y;
        tape->record([xi, ai, yi, N, C, H, W, S, row_region, col_region]() mutable {
            yi.ensure_grad();
            xi.ensure_grad();
            ai.ensure_grad();
            const T* dy = yi.grad().data();
            T* dx = xi.grad().data();
            T* da = ai.grad().data();
            for (std::int64_t nc = 0; nc < N * C; ++nc) {
                const T* gplane = dy + nc * H * W;
                const T* plane = xi.data() + nc * H * W;
                const T* agrid = ai.data() + nc * S * S;
                T* dxp = dx + nc * H * W;
                T* dag = da + nc * S * S;
                for (std::int64_t i = 0; i < H; ++i) {
                    const std::int64_t ra = row_region[static_cast<std::size_t>(i)];
                    for (std::int64_t j = 0; j < W; ++j) {
                        const std::int64_t rb = col_region[static_cast<std::size_t>(j)];
                        dxp[i * W + j] += gplane[i * W + j] * agrid[ra * S + rb];
                        dag[ra * S + rb] += gplane[i * W + j] * plane[i * W + j];
                    }
                }
            }
        });
    }
    return y;
}

// Channel-wise concatenation of same-sized NCHW tensors.
template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>> xs, Tape<T>* tape = nullptr) {
    if (xs.empty()) throw ShapeError("concat_channels needs at least one tensor");
    for (const auto& t : xs) detail::require_rank4(t, "concat_channels");
    const std::int64_t N = xs[0].dim(0), H = xs[0].dim(2), W = xs[0].dim(3);
    std::int64_t Ctotal = 0;
    for (const auto& t : xs) {
        if (t.dim(0) != N || t.dim(2) != H || t.dim(3) != W) {
            throw ShapeError("concat_channels spatial/batch mismatch: " + shape_str(t.shape()) +
                             " vs " + shape_str(xs[0].shape()));
        }
        Ctotal += t.dim(1);
    }
    Tensor<T> y = Tensor<T>::zeros({N, Ctotal, H, W});
    const std::int64_t plane = H * W;
    for (std::int64_t n = 0; n < N; ++n) {
        T* dst = y.data() + n * Ctotal * plane;
        for (const auto& t : xs) {
            const std::int64_t c = t.dim(1);
            const T* src = t.data() + n * c * plane;
            std::copy(src, src + c * plane, dst);
            dst += c * plane;
        }
    }
    if (tape) {
        std::vector<Tensor<T>> parts(xs.begin(), xs.end());
        Tensor<T> yi = y;
        tape->record([parts, yi, N, Ctotal, plane]() mutable {
            yi.ensure_grad();
            for (std::int64_t n = 0; n < N; ++n) {
                const T* src = yi.grad().data() + n * Ctotal * plane;
                for (auto& t : parts) {
                    t.ensure_grad();
                    const std::int64_t c = t.dim(1);
                    T* dst = t.grad().data() + n * c * plane;
                    for (std::int64_t i = 0; i < c * plane; ++i) dst[i] += src[i];
                    src += c * plane;
                }
            }
        });
    }
    return y;
}

template <typename T>
Tensor<T> concat_channels(std::initializer_list<Tensor<T>> xs, Tape<T>* tape = nullptr) {
    std::vector<Tensor<T>> v(xs);
    return concat_channels(std::span<const Tensor<T>>(v), tape);
}

namespace detail {

// out[n, c, h*r+i, w*r+j] = in[n, c*r*r + i*r + j, h, w]
template <typename T>
void shuffle_forward(const T* in, T* out, std::int64_t N, std::int64_t Cout, std::int64_t r,
                     std::int64_t H, std::int64_t W, bool add) {
    for (std::int64_t n = 0; n < N; ++n) {
        for (std::int64_t c = 0; c < Cout; ++c) {
            T* oplane = out + (n * Cout + c) * (H * r) * (W * r);
            for (std::int64_t i = 0; i < r; ++i) {
                for (std::int64_t j = 0; j < r; ++j) {
                    const T* iplane = in + (n * Cout * r * r + c * r * r + i * r + j) * H * W;
                    for (std::int64_t h = 0; h < H; ++h) {
                        T* orow = oplane + (h * r + i) * (W * r) + j;
                        const T* irow = iplane + h * W;
                        for (std::int64_t w = 0; w < W; ++w) {
                            if (add)
                                orow[w * r] += irow[w];
                            else
                                orow[w * r] = irow[w];
                        }
                    }
                }
            }
        }
    }
}

// Adjoint/inverse gather: out[n, c*r*r + i*r + j, h, w] = in[n, c, h*r+i, w*r+j]
template <typename T>
void shuffle_inverse(const T* in, T* out, std::int64_t N, std::int64_t Cout, std::int64_t r,
                     std::int64_t H, std::int64_t W, bool add) {
    for (std::int64_t n = 0; n < N; ++n) {
        for (std::int64_t c = 0; c < Cout; ++c) {
            const T* iplane = in + (n * Cout + c) * (H * r) * (W * r);
            for (std::int64_t i = 0; i < r; ++i) {
                for (std::int64_t j = 0; j < r; ++j) {
                    T* oplane = out + (n * Cout * r * r + c * r * r + i * r + j) * H * W;
                    for (std::int64_t h = 0; h < H; ++h) {
                        const T* irow = iplane + (h * r + i) * (W * r) + j;
                        T* orow = oplane + h * W;
                        for (std::int64_t w = 0; w < W; ++w) {
                            if (add)
                                orow[w] += irow[w * r];
                            else
                                orow[w] = irow[w * r];
                        }
                    }
                }
            }
        }
    }
}

}  // namespace detail

// Sub-pixel rearrangement: [N, C*r^2, H, W] -> [N, C, r*H, r*W].
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::int64_t r, Tape<T>* tape = nullptr) {
    detail::require_rank4(x, "pixel_shuffle");
    if (r < 1) throw ShapeError("pixel_shuffle requires r >= 1");
    const std::int64_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (C % (r * r) != 0) {
        throw ShapeError("pixel_shuffle needs channels divisible by r^2, got " +
                         shape_str(x.shape()) + " with r=" + std::to_string(r));
    }
    const std::int64_t Cout = C / (r * r);
    Tensor<T> y = Tensor<T>::zeros({N, Cout, H * r, W * r});
    detail::shuffle_forward(x.data(), y.data(), N, Cout, r, H, W, /*add=*/false);
    if (tape) {
        Tensor<T> xi = x, yi = y;
        tape->record([xi, yi, N, Cout, r, H, W]() mutable {
            yi.ensure_grad();
            xi.ensure_grad();
            detail::shuffle_inverse(yi.grad().data(), xi.grad().data(), N, Cout, r, H, W,
                                    /*add=*/true);
        });
    }
    return y;
}

// Inverse of pixel_shuffle: [N, C, r*H, r*W] -> [N, C*r^2, H, W].
template <typename T>
Tensor<T> space_to_depth(const Tensor<T>& x, std::int64_t r, Tape<T>* tape = nullptr) {
    detail::require_rank4(x, "space_to_depth");
    if (r < 1) throw ShapeError("space_to_depth requires r >= 1");
    const std::int64_t N = x.dim(0), C = x.dim(1), Hr = x.dim(2), Wr = x.dim(3);
    if (Hr % r != 0 || Wr % r != 0) {
        throw ShapeError("space_to_depth needs spatial extents divisible by r, got " +
                         shape_str(x.shape()) + " with r=" + std::to_string(r));
    }
    Tensor<T> y = Tensor<T>::zeros({N, C * r * r, Hr / r, Wr / r});
    detail::shuffle_inverse(x.data(), y.data(), N, C, r, Hr / r, Wr / r, /*add=*/false);
    if (tape) {
        Tensor<T> xi = x, yi = y;
        tape->record([xi, yi, N, C, r, Hr, Wr]() mutable {
            yi.ensure_grad();
            xi.ensure_grad();
            detail::shuffle_forward(yi.grad().data(), xi.grad().data(), N, C, r, Hr / r, Wr / r,
                                    /*add=*/true);
        });
    }
    return y;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b, Tape<T>* tape = nullptr) {
    if (a.shape() != b.shape()) {
        throw ShapeError("add shape mismatch: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
    Tensor<T> y = Tensor<T>::zeros(a.shape());
    const std::int64_t n = a.numel();
    for (std::int64_t i = 0; i < n; ++i) y.data()[i] = a.data()[i] + b.data()[i];
    if (tape) {
        Tensor<T> ai = a, bi = b, yi = y;
        tape->record([ai, bi, yi, n]() mutable {
            yi.ensure_grad();
            ai.ensure_grad();
            bi.ensure_grad();
            const T* dy = yi.grad().data();
            for (std::int64_t i = 0; i < n; ++i) {
                ai.grad()[i] += dy[i];
                bi.grad()[i] += dy[i];
            }
        });
    }
    return y;
}

// Mean absolute error over every element; the subgradient at zero difference
// is taken as 0.
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target, Tape<T>* tape = nullptr) {
    if (pred.shape() != target.shape()) {
        throw ShapeError("l1_loss shape mismatch: " + shape_str(pred.shape()) + " vs " +
                         shape_str(target.shape()));
    }
    const std::int64_t n = pred.numel();
    T acc = T(0);
    for (std::int64_t i = 0; i < n; ++i) acc += std::abs(pred.data()[i] - target.data()[i]);
    Tensor<T> y = Tensor<T>::from_data({1}, {acc / static_cast<T>(n)});
    debug_check_finite(y, "l1_loss");
    if (tape) {
        Tensor<T> pi = pred, ti = target, yi = y;
        tape->record([pi, ti, yi, n]() mutable {
            yi.ensure_grad();
            pi.ensure_grad();
            ti.ensure_grad();
            const T g = yi.grad()[0] / static_cast<T>(n);
            for (std::int64_t i = 0; i < n; ++i) {
                const T d = pi.data()[i] - ti.data()[i];
                const T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
                pi.grad()[i] += s;
                ti.grad()[i] -= s;
            }
        });
    }
    return y;
}

}  // namespace mgan
