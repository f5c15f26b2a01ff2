#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "mgan/tensor.hpp"

namespace mgan {

namespace detail {

// All three kernels keep a fixed per-element reduction order regardless of
// thread count: threads own disjoint output ranges and each output element is
// reduced by exactly one thread, so results are bit-identical run to run.

// C[M,N] += A[M,K] * B[K,N]
template <typename T>
void gemm_nn(std::int64_t M, std::int64_t N, std::int64_t K, const T* A, const T* B, T* C) {
    const std::size_t rows_per_task =
        (std::size_t(1) << 19) / static_cast<std::size_t>(std::max<std::int64_t>(1, N * K)) + 1;
    runtime::parallel_for(static_cast<std::size_t>(M), rows_per_task,
                          [&](std::size_t m0, std::size_t m1) {
        for (std::size_t m = m0; m < m1; ++m) {
            T* crow = C + m * N;
            const T* arow = A + m * K;
            for (std::int64_t k = 0; k < K; ++k) {
                const T a = arow[k];
                if (a == T(0)) continue;
                const T* brow = B + k * N;
                for (std::int64_t n = 0; n < N; ++n) crow[n] += a * brow[n];
            }
        }
    });
}

// C[M,K] += A[M,N] * B[K,N]^T
template <typename T>
void gemm_nt(std::int64_t M, std::int64_t N, std::int64_t K, const T* A, const T* B, T* C) {
    const std::size_t rows_per_task =
        (std::size_t(1) << 19) / static_cast<std::size_t>(std::max<std::int64_t>(1, N * K)) + 1;
    runtime::parallel_for(static_cast<std::size_t>(M), rows_per_task,
                          [&](std::size_t m0, std::size_t m1) {
        for (std::size_t m = m0; m < m1; ++m) {
            const T* arow = A + m * N;
            T* crow = C + m * K;
            for (std::int64_t k = 0; k < K; ++k) {
                const T* brow = B + k * N;
                T acc = T(0);
                for (std::int64_t n = 0; n < N; ++n) acc += arow[n] * brow[n];
                crow[k] += acc;
            }
        }
    });
}

// C[K,N] += A[M,K]^T * B[M,N]
template <typename T>
void gemm_tn(std::int64_t M, std::int64_t N, std::int64_t K, const T* A, const T* B, T* C) {
    // Parallel over column ranges of C; every thread scans all of A/B.
    const std::size_t cols_per_task =
        (std::size_t(1) << 19) / static_cast<std::size_t>(std::max<std::int64_t>(1, M * K)) + 1;
    runtime::parallel_for(static_cast<std::size_t>(N), cols_per_task,
                          [&](std::size_t n0, std::size_t n1) {
        for (std::int64_t m = 0; m < M; ++m) {
            const T* arow = A + m * K;
            const T* brow = B + m * N;
            for (std::int64_t k = 0; k < K; ++k) {
                const T a = arow[k];
                if (a == T(0)) continue;
                T* crow = C + k * N;
                for (std::size_t n = n0; n < n1; ++n) crow[n] += a * brow[n];
            }
        }
    });
}

// One image: [C,H,W] -> col[C*kh*kw, Ho*Wo] with zero padding.
template <typename T>
void im2col(const T* im, std::int64_t C, std::int64_t H, std::int64_t W, std::int64_t kh,
            std::int64_t kw, std::int64_t stride, std::int64_t pad, std::int64_t Ho,
            std::int64_t Wo, T* col) {
    for (std::int64_t c = 0; c < C; ++c) {
        const T* plane = im + c * H * W;
        for (std::int64_t ki = 0; ki < kh; ++ki) {
            for (std::int64_t kj = 0; kj < kw; ++kj) {
                T* dst = col + ((c * kh + ki) * kw + kj) * Ho * Wo;
                for (std::int64_t oi = 0; oi < Ho; ++oi) {
                    const std::int64_t i = oi * stride - pad + ki;
                    if (i < 0 || i >= H) {
                        std::fill(dst, dst + Wo, T(0));
                        dst += Wo;
                        continue;
                    }
                    const T* src = plane + i * W;
                    for (std::int64_t oj = 0; oj < Wo; ++oj) {
                        const std::int64_t j = oj * stride - pad + kj;
                        *dst++ = (j < 0 || j >= W) ? T(0) : src[j];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-add col back into the image. Serial by design,
// overlapping windows accumulate in a fixed order.
template <typename T>
void col2im_add(const T* col, std::int64_t C, std::int64_t H, std::int64_t W, std::int64_t kh,
                std::int64_t kw, std::int64_t stride, std::int64_t pad, std::int64_t Ho,
                std::int64_t Wo, T* im) {
    for (std::int64_t c = 0; c < C; ++c) {
        T* plane = im + c * H * W;
        for (std::int64_t ki = 0; ki < kh; ++ki) {
            for (std::int64_t kj = 0; kj < kw; ++kj) {
                const T* src = col + ((c * kh + ki) * kw + kj) * Ho * Wo;
                for (std::int64_t oi = 0; oi < Ho; ++oi) {
                    const std::int64_t i = oi * stride - pad + ki;
                    if (i < 0 || i >= H) {
                        src += Wo;
                        continue;
                    }
                    T* dst = plane + i * W;
                    for (std::int64_t oj = 0; oj < Wo; ++oj) {
                        const std::int64_t j = oj * stride - pad + kj;
                        if (j >= 0 && j < W) dst[j] += src[oj];
                    }
                    src += Wo;
                }
            }
        }
    }
}

}  // namespace detail

// 2D convolution, NCHW, zero padding. weight is [Cout,Cin,kh,kw], bias [Cout].
// Odd kernels only; output extents must come out positive.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 std::int64_t stride, std::int64_t padding, Tape<T>* tape = nullptr) {
    if (input.rank() != 4 || weight.rank() != 4) {
        throw ShapeError("conv2d expects 4-D input and weight, got " + shape_str(input.shape()) +
                         " and " + shape_str(weight.shape()));
    }
    const std::int64_t N = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
    const std::int64_t Cout = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
    if (weight.dim(1) != Cin) {
        throw ShapeError("conv2d channel mismatch: input has " + std::to_string(Cin) +
                         ", weight expects " + std::to_string(weight.dim(1)));
    }
    if (kh % 2 == 0 || kw % 2 == 0) {
        throw ShapeError("conv2d requires odd kernel extents, got " + shape_str(weight.shape()));
    }
    if (bias.rank() != 1 || bias.dim(0) != Cout) {
        throw ShapeError("conv2d bias must be [" + std::to_string(Cout) + "], got " +
                         shape_str(bias.shape()));
    }
    if (stride < 1 || padding < 0) {
        throw ShapeError("conv2d requires stride >= 1 and padding >= 0");
    }
    const std::int64_t Ho = (H + 2 * padding - kh) / stride + 1;
    const std::int64_t Wo = (W + 2 * padding - kw) / stride + 1;
    if (H + 2 * padding - kh < 0 || W + 2 * padding - kw < 0 || Ho <= 0 || Wo <= 0) {
        throw ShapeError("conv2d output extent is non-positive for input " +
                         shape_str(input.shape()) + " kernel " + shape_str(weight.shape()));
    }

    const std::int64_t K = Cin * kh * kw;
    const std::int64_t P = Ho * Wo;
    Tensor<T> out = Tensor<T>::zeros({N, Cout, Ho, Wo});
    std::vector<T> col(static_cast<std::size_t>(K * P));
    for (std::int64_t n = 0; n < N; ++n) {
        detail::im2col(input.data() + n * Cin * H * W, Cin, H, W, kh, kw, stride, padding, Ho, Wo,
                       col.data());
        T* dst = out.data() + n * Cout * P;
        detail::gemm_nn(Cout, P, K, weight.data(), col.data(), dst);
        for (std::int64_t co = 0; co < Cout; ++co) {
            const T b = bias.data()[co];
            if (b == T(0)) continue;
            T* row = dst + co * P;
            for (std::int64_t p = 0; p < P; ++p) row[p] += b;
        }
    }
    debug_check_finite(out, "conv2d");

    if (tape) {
        Tensor<T> x = input, w = weight, b = bias, y = out;
        tape->record([x, w, b, y, N, Cin, H, W, Cout, kh, kw, stride, padding, Ho, Wo, K,
                      P]() mutable {
            y.ensure_grad();
            x.ensure_grad();
            w.ensure_grad();
            b.ensure_grad();
            const T* dy = y.grad().data();
            for (std::int64_t co = 0; co < Cout; ++co) {
                T acc = T(0);
                for (std::int64_t n = 0; n < N; ++n) {
                    const T* row = dy + (n * Cout + co) * P;
                    for (std::int64_t p = 0; p < P; ++p) acc += row[p];
                }
                b.grad()[co] += acc;
            }
            std::vector<T> col(static_cast<std::size_t>(K * P));
            std::vector<T> dcol(static_cast<std::size_t>(K * P));
            for (std::int64_t n = 0; n < N; ++n) {
                detail::im2col(x.data() + n * Cin * H * W, Cin, H, W, kh, kw, stride, padding, Ho,
                               Wo, col.data());
                const T* dyn = dy + n * Cout * P;
                detail::gemm_nt(Cout, P, K, dyn, col.data(), w.grad().data());
                std::fill(dcol.begin(), dcol.end(), T(0));
                detail::gemm_tn(Cout, P, K, w.data(), dyn, dcol.data());
                detail::col2im_add(dcol.data(), Cin, H, W, kh, kw, stride, padding, Ho, Wo,
                                   x.grad().data() + n * Cin * H * W);
            }
        });
    }
    return out;
}

}  // namespace mgan
