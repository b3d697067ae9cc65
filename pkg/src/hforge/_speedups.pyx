# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled convolution kernel for integer group rings over Cayley tables."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def convolve_into(
    cnp.int64_t[::1] out,
    const cnp.int64_t[::1] a,
    const cnp.int64_t[::1] b,
    const cnp.int32_t[:, ::1] mul,
    const cnp.int64_t[::1] a_support,
    const cnp.int64_t[::1] b_support,
):
    cdef Py_ssize_t i, j, na, nb
    cdef cnp.int64_t h, k, ah
    na = a_support.shape[0]
    nb = b_support.shape[0]
    for i in range(na):
        h = a_support[i]
        ah = a[h]
        for j in range(nb):
            k = b_support[j]
            out[mul[h, k]] += ah * b[k]


def scatter_map(
    cnp.int64_t[::1] out,
    const cnp.int64_t[::1] a,
    const cnp.int32_t[::1] images,
    const cnp.int64_t[::1] support,
):
    cdef Py_ssize_t i, n
    cdef cnp.int64_t g
    n = support.shape[0]
    for i in range(n):
        g = support[i]
        out[images[g]] += a[g]
