"""Compare the jitted and pure-Python kernel paths on the hot loops.

Run twice to see both sides:

    python benchmarks/bench_kernels.py            # jitted when available
    QUANTAL_NUMBA=0 python benchmarks/bench_kernels.py
"""

import os
import time

import numpy as np


def bench(label, f, repeat=5):
    f()  # warm up (and compile, on the jitted path)
    best = min(_timed(f) for _ in range(repeat))
    print(f"{label:38s} {best * 1e3:9.3f} ms")
    return best


def _timed(f):
    t0 = time.perf_counter()
    f()
    return time.perf_counter() - t0


def main():
    from quantal import _kernels as K
    from quantal.numerics import InfoMatrix, TrialSet, fit_mle, kstar
    from quantal.session import SessionConfig, run_batch
    from quantal.phase1 import Phase1Config, Procedure
    from quantal.confidence import lr_joint_contour

    print(f"numba in use: {K.USE_NUMBA}")
    rng = np.random.default_rng(1)
    x = np.round(rng.normal(10, 2, size=60), 2)
    y = (rng.random(60) < 0.5).astype(np.int64)
    t = TrialSet.from_xy(x, y)

    bench("loglik x 2000 (n=60)",
          lambda: [K.loglik(x, y, 10.0, 1.5) for _ in range(2000)])
    bench("info entries x 2000 (n=60)",
          lambda: [K.info_entries(x, 10.0, 1.5) for _ in range(2000)])
    bench("probit fit x 200 (n=60)",
          lambda: [fit_mle(t) for _ in range(200)])
    b = InfoMatrix(2.3, 0.4, 1.9, 0.0, 1.0)
    bench("next D-optimal offset x 50", lambda: [kstar(b) for _ in range(50)])

    ys = rng.integers(0, 2, size=18).tolist()
    cfg = SessionConfig(Phase1Config(Procedure.THREEPOD, 2.137, 13.907, 1.373),
                        reso=.01)
    bench("full batch session x 20",
          lambda: [run_batch(cfg, ys, n2=3, n3=4, p=.85, lam=1.0)
                   for _ in range(20)])

    t6 = TrialSet.from_xy([1.0, 1.5, 2.0, 2.5, 3.0, 1.8], [0, 1, 0, 1, 1, 0])
    bench("joint LR contour (320 slices) x 3",
          lambda: [lr_joint_contour(t6, .8) for _ in range(3)])


if __name__ == "__main__":
    main()
