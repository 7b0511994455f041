# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled reduced row echelon kernel; same contract as numcore._rref_rows_python."""

cdef inline double _abs2(double complex x) nogil:
    return x.real * x.real + x.imag * x.imag


def rref_rows(double complex[:, ::1] r, double cutoff):
    """In-place reduced row echelon form with partial pivoting; returns the pivot count."""
    cdef Py_ssize_t rows = r.shape[0], cols = r.shape[1]
    cdef Py_ssize_t c, i, j, k, pivot_row = 0
    cdef double best, a, cut2 = cutoff * cutoff
    cdef double complex piv, f, tmp
    with nogil:
        for c in range(cols):
            if pivot_row == rows:
                break
            k = pivot_row
            best = _abs2(r[pivot_row, c])
            for i in range(pivot_row + 1, rows):
                a = _abs2(r[i, c])
                if a > best:
                    best = a
                    k = i
            if best <= cut2:
                for i in range(pivot_row, rows):
                    r[i, c] = 0
                continue
            if k != pivot_row:
                for j in range(cols):
                    tmp = r[pivot_row, j]
                    r[pivot_row, j] = r[k, j]
                    r[k, j] = tmp
            piv = r[pivot_row, c]
            for j in range(cols):
                r[pivot_row, j] = r[pivot_row, j] / piv
            for i in range(rows):
                if i == pivot_row:
                    continue
                f = r[i, c]
                if f.real == 0 and f.imag == 0:
                    continue
                for j in range(cols):
                    r[i, j] = r[i, j] - f * r[pivot_row, j]
                r[i, c] = 0
            r[pivot_row, c] = 1
            pivot_row += 1
    return pivot_row
