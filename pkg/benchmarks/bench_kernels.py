"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Times each kernel on representative shapes, then one full separable-state
search and one phase-ensemble solve per backend. The backend of the
high-level calls is switched by rebinding ``scent.kernels``.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from scent import _pykernels, kernels, qmath, ree
from scent import phase_ensemble as pe
from scent.states import embed, SchmidtCorrelatedState

try:
    from scent import _ckernels
except ImportError:
    _ckernels = None

NAMES = ("phase_residual_jac", "mixture_state", "separable_forward", "separable_backward")


def _inputs(d=3, K=6, M=81):
    g = np.random.default_rng(0)
    theta = g.uniform(0, 2 * np.pi, (K, d))
    p = g.dirichlet(np.ones(K))
    c = qmath.random_density_matrix(d, g)
    c = c / np.sqrt(np.outer(np.diag(c).real, np.diag(c).real))
    D = d * d
    x = g.standard_normal(2 * M * d * 2 + M)
    psi = g.standard_normal((M, D)) + 1j * g.standard_normal((M, D))
    q = g.dirichlet(np.ones(M))
    return theta, p, c, x, psi, q, M, d


def _kernel_calls(mod, args):
    theta, p, c, x, psi, q, M, d = args
    sigma, cache = mod.separable_forward(x, M, d, d)
    gmat = qmath.random_density_matrix(d * d, np.random.default_rng(1))
    return {
        "phase_residual_jac": lambda: mod.phase_residual_jac(theta, p, c),
        "mixture_state": lambda: mod.mixture_state(psi, q),
        "separable_forward": lambda: mod.separable_forward(x, M, d, d),
        "separable_backward": lambda: mod.separable_backward(gmat, cache),
    }


def _with_backend(mod, fn):
    saved = {n: getattr(kernels, n) for n in NAMES}
    for n in NAMES:
        setattr(kernels, n, getattr(mod, n))
    try:
        return fn()
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)

    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    data = _inputs()
    print(f"{'kernel':<22}" + "".join(f"{b:>14}" for b, _ in backends) + f"{'speedup':>10}")
    for name in NAMES:
        times = []
        for _, mod in backends:
            call = _kernel_calls(mod, data)[name]
            times.append(min(timeit.repeat(call, number=args.repeat, repeat=3)) / args.repeat)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{name:<22}" + "".join(f"{t * 1e6:>12.1f}us" for t in times) + speed)

    rho = np.asarray(embed(SchmidtCorrelatedState(3, qmath.random_density_matrix(3, np.random.default_rng(2)))))
    target = qmath.random_density_matrix(4, np.random.default_rng(3))
    tasks = {
        "ree_oracle d=3 x4": lambda: ree.ree_oracle(rho, (3, 3), restarts=4),
        "solve_phase d=4": lambda: pe.solve_phase_ensemble(target, seed=0),
    }
    for label, fn in tasks.items():
        times = []
        for _, mod in backends:
            times.append(min(timeit.repeat(lambda: _with_backend(mod, fn), number=1, repeat=2)))
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{label:<22}" + "".join(f"{t:>13.3f}s" for t in times) + speed)


if __name__ == "__main__":
    main()
