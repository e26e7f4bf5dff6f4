# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled training hot loops; mirrors _kernels_py exactly.

The two matrix-vector products go through BLAS dgemv; the elementwise
logistic/hinge math runs in fused C loops with no temporaries beyond the
margin and coefficient vectors.
"""

from libc.math cimport exp, log1p

import numpy as np

from scipy.linalg.cython_blas cimport dgemv

BACKEND = "cython"


cdef void _xw(double[:, ::1] X, double[::1] v, double[::1] out) noexcept:
    # out = X @ v for C-contiguous X: dgemv on X seen as Fortran (d, n), trans='T'
    cdef int n = X.shape[0], d = X.shape[1], inc = 1
    cdef double one = 1.0, zero = 0.0
    dgemv("T", &d, &n, &one, &X[0, 0], &d, &v[0], &inc, &zero, &out[0], &inc)


cdef void _xtc(double[:, ::1] X, double[::1] c, double alpha, double[::1] out) noexcept:
    # out = alpha * X.T @ c
    cdef int n = X.shape[0], d = X.shape[1], inc = 1
    cdef double zero = 0.0
    dgemv("N", &d, &n, &alpha, &X[0, 0], &d, &c[0], &inc, &zero, &out[0], &inc)


def logistic_loss_grad(double[:, ::1] X, double[::1] z, double[::1] w, double b):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t i
    cdef double m, em, loss = 0.0, grad_b = 0.0, cc

    margins_arr = np.empty(n)
    coef_arr = np.empty(n)
    grad_w_arr = np.empty(d)
    cdef double[::1] margins = margins_arr
    cdef double[::1] coef = coef_arr
    cdef double[::1] grad_w = grad_w_arr

    _xw(X, w, margins)
    for i in range(n):
        m = z[i] * (margins[i] + b)
        if m >= 0:
            em = exp(-m)
            loss += log1p(em)
            cc = z[i] * (-em / (1.0 + em))
        else:
            em = exp(m)
            loss += -m + log1p(em)
            cc = z[i] * (-1.0 / (1.0 + em))
        coef[i] = cc
        grad_b += cc
    _xtc(X, coef, 1.0 / n, grad_w)
    return loss / n, grad_w_arr, grad_b / n


def hinge_loss_grad(double[:, ::1] X, double[::1] z, double[::1] w, double b, double reg):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t i
    cdef double slack, obj = 0.0, grad_b = 0.0, wsq = 0.0

    margins_arr = np.empty(n)
    coef_arr = np.empty(n)
    grad_w_arr = np.empty(d)
    cdef double[::1] margins = margins_arr
    cdef double[::1] coef = coef_arr
    cdef double[::1] grad_w = grad_w_arr

    _xw(X, w, margins)
    for i in range(n):
        slack = 1.0 - z[i] * (margins[i] + b)
        if slack > 0.0:
            obj += slack
            coef[i] = -z[i]
            grad_b -= z[i]
        else:
            coef[i] = 0.0
    _xtc(X, coef, 1.0 / n, grad_w)
    for i in range(d):
        wsq += w[i] * w[i]
        grad_w[i] += reg * w[i]
    return obj / n + 0.5 * reg * wsq, grad_w_arr, grad_b / n
