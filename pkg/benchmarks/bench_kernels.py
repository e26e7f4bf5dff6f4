"""Compare the compiled training kernels against the numpy fallback.

Times the two hot functions (logistic loss+gradient, hinge loss+gradient)
and a full logreg fit at corpus-like shapes.

    python benchmarks/bench_kernels.py
"""
from __future__ import annotations

import time

import numpy as np

from sentry.hatespeech import _kernels_py

try:
    from sentry.hatespeech import _kernels_c
except ImportError:
    _kernels_c = None


def bench(fn, *args, repeats: int = 100, trials: int = 5) -> float:
    fn(*args)  # warm up
    best = float("inf")
    for _ in range(trials):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def fit_once(backend) -> float:
    from sentry.hatespeech.models import soft_threshold

    rng = np.random.default_rng(3)
    X = np.ascontiguousarray(rng.normal(size=(600, 800)))
    z = np.ascontiguousarray(np.where(rng.random(600) > 0.5, 1.0, -1.0))
    w = np.zeros(800)
    b = 0.0
    t0 = time.perf_counter()
    for _ in range(150):
        _loss, gw, gb = backend.logistic_loss_grad(X, z, w, b)
        w = soft_threshold(w - 0.5 * np.asarray(gw), 1e-4)
        b -= 0.5 * gb
    return time.perf_counter() - t0


def main() -> None:
    rng = np.random.default_rng(1)
    shapes = [(100, 200), (600, 800), (2000, 1500)]
    print(f"{'shape':>14} {'kernel':>22} {'python/ms':>10} {'cython/ms':>10} {'speedup':>8}")
    for n, d in shapes:
        X = np.ascontiguousarray(rng.normal(size=(n, d)))
        z = np.ascontiguousarray(np.where(rng.random(n) > 0.5, 1.0, -1.0))
        w = np.ascontiguousarray(rng.normal(size=d) * 0.1)
        for name in ("logistic_loss_grad", "hinge_loss_grad"):
            extra = (0.01,) if name == "hinge_loss_grad" else ()
            t_py = bench(getattr(_kernels_py, name), X, z, w, 0.1, *extra)
            if _kernels_c is not None:
                t_c = bench(getattr(_kernels_c, name), X, z, w, 0.1, *extra)
                print(
                    f"{n}x{d:>9} {name:>22} {t_py*1000:10.3f} {t_c*1000:10.3f} "
                    f"{t_py/t_c:7.2f}x"
                )
            else:
                print(f"{n}x{d:>9} {name:>22} {t_py*1000:10.3f} {'n/a':>10} {'n/a':>8}")

    print("\nfull 150-iteration logreg loop at 600x800:")
    print(f"  python backend: {fit_once(_kernels_py)*1000:8.1f} ms")
    if _kernels_c is not None:
        print(f"  cython backend: {fit_once(_kernels_c)*1000:8.1f} ms")
    else:
        print("  cython backend: not built")


if __name__ == "__main__":
    main()
