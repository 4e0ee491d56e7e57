"""Reference dual objectives for the fixed SVM instances in test_kernel_svm.cpp.

Solves max 1'a - 1/2 a'Qa, 0 <= a <= C, y'a = 0 with cvxopt at tight
tolerances. Rerun after changing an instance and paste the printed values.
"""
import numpy as np
from cvxopt import matrix, solvers

solvers.options.update(show_progress=False, abstol=1e-13, reltol=1e-13, feastol=1e-13, maxiters=200)


def kernel(kind, bw, a, b):
    if kind == "linear":
        return float(a @ b)
    return float(np.exp(-bw * np.sum((a - b) ** 2)))


def dual_objective(X, y, C, kind="linear", bw=1.0):
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n = len(y)
    K = np.array([[kernel(kind, bw, X[i], X[j]) for j in range(n)] for i in range(n)])
    Q = np.outer(y, y) * K
    P = matrix(Q)
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), C * np.ones(n)]))
    A = matrix(y.reshape(1, -1))
    b = matrix(0.0)
    sol = solvers.qp(P, q, G, h, A, b)
    a = np.array(sol["x"]).ravel()
    return a.sum() - 0.5 * a @ Q @ a


INSTANCES = {
    "two_point": ([[1.0], [-1.0]], [1, -1], 10.0, "linear", 1.0),
    "overlap_linear": (
        [[0.0, 1.0], [1.0, 0.5], [2.0, 2.0], [0.5, -1.0], [-1.0, 0.0], [1.5, 0.2]],
        [1, 1, 1, -1, -1, -1], 1.0, "linear", 1.0),
    "separable_c100": (
        [[2.0, 1.0, 0.0], [1.5, 2.5, -0.5], [3.0, 0.0, 1.0], [-1.0, -2.0, 0.5], [-2.0, 0.5, -1.0], [0.0, -3.0, 0.0]],
        [1, 1, 1, -1, -1, -1], 100.0, "linear", 1.0),
    "gaussian_xor": (
        [[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [0.2, 0.1]],
        [1, 1, -1, -1, 1], 10.0, "gaussian", 0.5),
}

if __name__ == "__main__":
    for name, args in INSTANCES.items():
        print(f"{name}: {dual_objective(*args)!r}")
