"""Smoke test for the kipq extension module.

Build first, then run from the repository root:

    cargo build --release -p kipq-py --features extension-module
    cp target/release/libkipq.so python/kipq.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import kipq  # noqa: E402


def check(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name} {detail}".rstrip())
    return ok


def main():
    results = []

    bg = kipq.EntropyModel.bg()
    rows = bg.catalog([1e-3, 0.1, 1.0, 10.0])
    results.append(check("bg f == 1", all(abs(r["f"] - 1.0) < 1e-15 for r in rows)))

    eip = kipq.EntropyModel.eip(-0.5, "linear")
    lo, hi = eip.admissible_interval()
    results.append(check("eip admissible upper end", abs(hi - 2.0) < 1e-12, f"({lo}, {hi})"))
    try:
        eip.ln_kappa(3.0)
        results.append(check("out-of-range density raises", False))
    except ValueError:
        results.append(check("out-of-range density raises", True))

    ts = kipq.EntropyModel.tsallis(2.0)
    y = ts.ln_kappa(0.3)
    results.append(check("tsallis inverse", abs(ts.ln_kappa_inverse(y) - 0.3) < 1e-10))

    n, length = 256, 20.0
    xs = [-length / 2 + length * i / n for i in range(n)]
    rho = kipq.equilibrium(bg, [0.5 * x * x for x in xs], length)
    gibbs = [math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi) for x in xs]
    gap = max(abs(a - b) for a, b in zip(rho, gibbs))
    results.append(check("bg equilibrium is gibbs", gap < 1e-10, f"{gap:.2e}"))

    relax = kipq.nfpe_relax(
        "[physics]\ndiffusion = 1\n[potential]\nkind = harmonic\n"
        "[initial]\nkind = equilibrium\nshift = 1\n[integrator]\nkind = nfpe\nt_end = 2\ncadence = 100\n"
    )
    fe = relax["free_energy"]
    results.append(check("free energy decreases", all(b <= a for a, b in zip(fe, fe[1:]))))

    evo = kipq.nse_evolve("[physics]\ndiffusion = 0.1\n[initial]\nk = 1\n[integrator]\nkind = nse\nt_end = 0.2\n")
    drift = abs(evo["norm"][-1] - evo["norm"][0])
    results.append(check("nse norm conserved", drift < 1e-10, f"{drift:.2e}"))

    g = kipq.gauge_check(
        "[model]\nvariant = tsallis\nq = 1.5\n[physics]\ndiffusion = 0.05\n[initial]\nk = 1\n"
        "[integrator]\nkind = gauge_check\nt_end = 0.2\n"
    )
    results.append(check("gauge densities agree", g["max_linf"] < 1e-4, f"{g['max_linf']:.2e}"))

    try:
        kipq.normalize_scenario("[model]\nvariant = nope\n")
        results.append(check("bad scenario raises", False))
    except ValueError:
        results.append(check("bad scenario raises", True))

    for cid, title, passed, line in kipq.verify([10, 11]):
        results.append(check(f"criterion {cid} {title}", passed))

    print(f"{sum(results)} of {len(results)} smoke checks passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
