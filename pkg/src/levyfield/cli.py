"""Command-line front end: simulate fields and run verification suites.

``levyfield simulate --config FILE [--seed N] [--out DIR]`` synthesizes
one field and writes it as CSV (17 significant digits, exact binary64
round trip), 16-bit binary PGM (affine map recorded in the sidecar) and a
provenance sidecar that is itself a valid config file: re-running it
reproduces the outputs byte for byte.

``levyfield verify --suite NAME [--seed N]`` runs a named check suite
(bounds, psd, inverses, adjoints, ecf, certificates, all), prints one
PASS/FAIL line per check and exits nonzero on any failure.  The only
environment knob is LEVYFIELD_THREADS (internal FFT workers); results do
not depend on it.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import charfunc, validate
from .config import ConfigError, format_config, parse_config_text
from .dirops import (
    FracFactor,
    OperatorSpec,
    directional_derivative,
    line_derivative,
    marginal_adjoint_left_inverse,
    marginal_right_inverse,
    modulation,
    stable_inverse,
)
from .fracops import corrected_riesz, frac_laplacian, k_count, riesz_potential
from .grids import gaussian_bump, random_smooth_bump, wave_packet
from .levy import (
    Dirac,
    LevyTriplet,
    Uniform,
    VarianceGamma,
    levy_exponent,
)
from .synth import FieldRealization, regenerate, sample_innovation

SUITES = ("bounds", "psd", "inverses", "adjoints", "ecf", "certificates", "all")


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def field_to_csv(field: FieldRealization) -> bytes:
    d = field.values.ndim
    index_names = ["i", "j", "k"][:d]
    lines = [",".join(index_names + ["value"])]
    for idx in np.ndindex(field.values.shape):
        lines.append(
            ",".join(str(c) for c in idx)
            + ","
            + format(float(field.values[idx]), ".17g")
        )
    return ("\n".join(lines) + "\n").encode()


def field_to_pgm(field: FieldRealization) -> tuple[bytes, float, float]:
    """Binary 16-bit P5; returns the affine range used for the mapping."""
    if field.values.ndim != 2:
        raise ValueError("PGM export is defined for d = 2 fields")
    vmin = float(field.values.min())
    vmax = float(field.values.max())
    span = vmax - vmin
    if span == 0:
        pix = np.zeros(field.values.shape, dtype=">u2")
    else:
        scaled = np.rint((field.values - vmin) / span * 65535.0)
        pix = scaled.astype(">u2")
    header = f"P5\n{field.values.shape[1]} {field.values.shape[0]}\n65535\n".encode()
    return header + pix.tobytes(), vmin, vmax


def cmd_simulate(args) -> int:
    path = Path(args.config)
    try:
        cfg = parse_config_text(path.read_text(), str(path))
        if args.seed is not None:
            cfg["seed"] = str(args.seed)
        field = regenerate(cfg)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sidecar = dict(field.provenance)
    _atomic_write(out / "field.csv", field_to_csv(field))
    if field.values.ndim == 2:
        pgm, vmin, vmax = field_to_pgm(field)
        _atomic_write(out / "field.pgm", pgm)
        sidecar["pgm_vmin"] = format(vmin, ".17g")
        sidecar["pgm_vmax"] = format(vmax, ".17g")
    _atomic_write(out / "field.provenance.txt", format_config(sidecar).encode())
    print(f"wrote {out / 'field.csv'}")
    if field.values.ndim == 2:
        print(f"wrote {out / 'field.pgm'}")
    print(f"wrote {out / 'field.provenance.txt'}")
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

class _Suite:
    def __init__(self):
        self.lines: list[tuple[str, bool, str]] = []

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.lines.append((name, bool(passed), detail))

    def emit(self) -> int:
        failures = 0
        for name, passed, detail in self.lines:
            tag = "PASS" if passed else "FAIL"
            suffix = f" {detail}" if detail else ""
            print(f"{tag} {name}{suffix}")
            failures += not passed
        return failures


_BOUND_TRIPLETS = [
    ("sas0.7", LevyTriplet.sas(0.7), (0.6, 0.8)),
    ("sas1.2", LevyTriplet.sas(1.2), (1.0, 1.4)),
    ("sas1.8", LevyTriplet.sas(1.8), (1.6, 2.0)),
    ("variance_gamma", LevyTriplet.variance_gamma(1.0), (1.0, 2.0)),
    ("asym_poisson", LevyTriplet.compound_poisson(1.0, Dirac(0.5)), (1.0, 2.0)),
]


def _suite_bounds(s: _Suite, seed: int) -> None:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    worst = 0.0
    for _ in range(2000):
        p = rng.uniform(0.05, 2.0)
        x, y = rng.normal(scale=5.0, size=2)
        bound = max(1.0, 2.0 ** ((p - 1.0) / 2.0)) * charfunc.h_metric(p, x, y)
        lhs = max(abs(x - y) ** p, abs(x * x - y * y) ** (p / 2.0))
        worst = max(worst, lhs - bound * (1.0 + 1e-12))
    s.check("pointwise-metric-bound", worst <= 0.0, f"max excess {worst:.3e}")

    shape, h = (128,), 1.0 / 32.0
    worst2 = worst3 = 0.0
    for _ in range(200):
        p = rng.uniform(0.2, 2.0)
        q = rng.uniform(p, 2.0)
        lam = rng.random()
        f = random_smooth_bump(shape, h, rng)
        g = random_smooth_bump(shape, h, rng)
        hsum = sum(
            charfunc.h_metric(p, a, b) for a, b in zip(f.values, g.values)
        ) * h
        worst2 = max(worst2, hsum - charfunc.H_metric(p, f, g) * (1.0 + 1e-12))
        mid = charfunc.H_metric(lam * p + (1 - lam) * q, f, g)
        rhs = math.sqrt(lam) * charfunc.H_metric(p, f, g) + math.sqrt(
            1 - lam
        ) * charfunc.H_metric(q, f, g)
        worst3 = max(worst3, mid - rhs * (1.0 + 1e-12))
    s.check("summed-metric-bound", worst2 <= 0.0, f"max excess {worst2:.3e}")
    s.check("interpolation-bound", worst3 <= 0.0, f"max excess {worst3:.3e}")

    for name, t, (p, q) in _BOUND_TRIPLETS:
        bc = charfunc.bound_constants(t, p, q)
        rep = charfunc.verify_g_bound(t, bc, trials=300, seed=seed + 1)
        s.check(f"g-bound-{name}", rep.passed, f"max ratio {rep.max_ratio:.4f}")
        rng2 = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed + 2)))
        worst_ratio, ok = 0.0, True
        for _ in range(60):
            a = random_smooth_bump(shape, h, rng2)
            b = random_smooth_bump(shape, h, rng2)
            r = charfunc.verify_continuity_bound(t, bc, a, b)
            ok &= r.passed
            worst_ratio = max(worst_ratio, r.ratio)
        s.check(f"continuity-bound-{name}", ok, f"max ratio {worst_ratio:.4f}")


def _suite_psd(s: _Suite, seed: int) -> None:
    shape, h = (128,), 1.0 / 32.0
    triplets = [
        ("gaussian", LevyTriplet.gaussian(0.0, 1.0)),
        ("sas0.7", LevyTriplet.sas(0.7)),
        ("poisson", LevyTriplet.compound_poisson(2.0, Uniform(-1.0, 1.0))),
    ]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    for name, t in triplets:
        ok, min_eig = True, math.inf
        for trial in range(10):
            n = int(rng.integers(1, 9))
            phis = [random_smooth_bump(shape, h, rng) for _ in range(n)]
            rep = charfunc.psd_gram_check(t, phis, seed=seed + trial)
            ok &= rep.passed
            min_eig = min(min_eig, rep.min_eigenvalue)
        s.check(f"gram-psd-{name}", ok, f"min eigenvalue {min_eig:.3e}")


def _suite_inverses(s: _Suite, seed: int) -> None:
    # carrier plus bandwidth stays below a quarter of the sampling rate, so
    # the dyadic dilation below remains alias-free
    n, h = 128, 1.0 / 32.0
    k0 = (2 * math.pi * 5.5, 2 * math.pi * 4.0)
    phi = wave_packet((n, n), h, k0, width=0.22)
    for gamma in (0.5, 1.3, 2.7):
        lap = frac_laplacian(phi, gamma)
        worst = 0.0
        for k in range(k_count(2, gamma) + 1):
            rec = corrected_riesz(lap, gamma, k)
            worst = max(
                worst,
                float(np.abs(rec.values - phi.values).max() / np.abs(phi.values).max()),
            )
        s.check(
            f"riesz-left-inverse-g{gamma}", worst <= 1e-10, f"rel sup err {worst:.2e}"
        )
    # dyadic scale invariance through periodic subsampling
    gamma = 1.3
    tame = wave_packet((n, n), h, (2 * math.pi * 4, 2 * math.pi * 3), width=0.25)
    o = tame.origin[0]
    idx = (np.arange(n) * 2 - o) % n
    phi2 = tame.with_values(tame.values[np.ix_(idx, idx)])
    lhs = riesz_potential(phi2, gamma)
    rhs = 2.0 ** -gamma * riesz_potential(tame, gamma).values[np.ix_(idx, idx)]
    rel = float(np.abs(lhs.values - rhs).max() / np.abs(lhs.values).max())
    s.check("riesz-scale-invariance", rel <= 1e-6, f"rel err {rel:.2e}")

    bump = gaussian_bump((n, n), h, width=0.35, center=(0.4, 0.2))
    inv = stable_inverse(bump, (2, 1), -1.4)
    back = directional_derivative(inv, (2, 1)).values + 1.4 * inv.values
    err = float(np.abs(back - bump.values).max())
    s.check("stable-inverse-identity", err <= 1e-10, f"sup err {err:.2e}")


def _suite_adjoints(s: _Suite, seed: int) -> None:
    n, h = 512, 1.0 / 128.0
    w0 = 1.7
    a = gaussian_bump((n, n), h, width=0.18, center=(0.3, 0.15))
    b = gaussian_bump((n, n), h, width=0.16, center=(-0.3, 0.2))

    J = marginal_right_inverse(a, (2, 1), w0)
    ld, mask = line_derivative(J, (2, 1))
    err = float(np.abs(ld.values - 1j * w0 * J.values - a.values)[mask].max())
    s.check("J-right-inverse", err <= 5e-3, f"sup err {err:.2e}")

    dstar = -directional_derivative(a, (2, 1)).values - 1j * w0 * a.values
    rec = marginal_adjoint_left_inverse(a.with_values(dstar), (2, 1), w0)
    err = float(np.abs(rec.values - a.values).max())
    s.check("Jstar-left-inverse", err <= 5e-3, f"sup err {err:.2e}")

    lhs = (J.values * b.values).sum() * h * h
    rhs = (a.values * marginal_adjoint_left_inverse(b, (2, 1), w0).values).sum() * h * h
    gap = abs(lhs - rhs)
    allow = 5e-3 * a.quasi_norm(2) * b.quasi_norm(2)
    s.check("adjoint-pairing", gap <= allow, f"gap {gap:.2e} allow {allow:.2e}")

    comp = modulation(
        marginal_right_inverse(modulation(a, (2, 1), -w0), (2, 1), 0.0), (2, 1), w0
    )
    err = float(np.abs(J.values - comp.values).max())
    s.check("modulation-identity", err <= 1e-12, f"sup err {err:.2e}")


def _suite_ecf(s: _Suite, seed: int) -> None:
    families = [
        ("gaussian", LevyTriplet.gaussian(0.3, 1.2)),
        ("sas1.5", LevyTriplet.sas(1.5, 0.8)),
        ("variance_gamma", LevyTriplet.variance_gamma(2.0)),
        ("poisson", LevyTriplet.compound_poisson(3.0, Uniform(-0.5, 1.5))),
    ]
    n, h = 20_000, 0.5
    ws = np.array([0.3, 1.0, 2.7, -1.3, 5.0])
    for name, t in families:
        f = sample_innovation(t, (n,), h, seed)
        emp = np.exp(1j * np.outer(ws, f.values)).mean(axis=1)
        ana = np.exp(h * levy_exponent(t, ws))
        err = float(np.abs(emp - ana).max())
        tol = 3.0 / math.sqrt(n) + 1e-3
        s.check(f"cell-law-{name}", err <= tol, f"max diff {err:.4f} tol {tol:.4f}")

    t = LevyTriplet.gaussian(0.0, 1.0)
    spec = OperatorSpec((), FracFactor(1.0))
    phi = gaussian_bump((32, 32), 1.0 / 32.0, width=0.07, center=(0.5, 0.5),
                        amplitude=30.0, origin=(0, 0))
    rep = validate.ecf_vs_analytic(t, spec, [phi], n_realizations=1500, seed=seed)
    s.check(
        "end-to-end-self-similar",
        rep.passed,
        f"max diff {rep.max_diff:.4f} tol {rep.probes[0].tolerance:.4f}",
    )


def _suite_certificates(s: _Suite, seed: int) -> None:
    frac = lambda g: OperatorSpec((), FracFactor(g))
    cases = [
        ("moment-class-reject", LevyTriplet.sas(1.0), None, None, 1.0, 1.0, False),
        ("moment-class-accept", LevyTriplet.sas(1.0), None, None, 0.9, 1.1, True),
        ("drift-forces-pmin", LevyTriplet(0.5, 0.0, VarianceGamma(1.0)), None, None, 2.0, 2.0, True),
        ("asymmetry-forces-pmin", LevyTriplet.compound_poisson(1.0, Dirac(0.5)), None, None, 2.0, 2.0, True),
        ("gauss-forces-pmax", LevyTriplet(0.0, 1.0, VarianceGamma(1.0)), None, None, 0.5, 0.5, True),
        ("high-sparsity-accept", LevyTriplet.sas(0.5), frac(0.6), 2, None, None, True),
        ("forbidden-exponent-reject", LevyTriplet.sas(1.8), frac(0.5), 1, 1.5, 2.0, False),
    ]
    for name, t, spec, d, p, q, expect in cases:
        cert = validate.compatibility_certificate(t, spec, d=d, p=p, q=q)
        s.check(
            f"certificate-{name}",
            cert.accepted == expect,
            f"got {'accept' if cert.accepted else 'reject'}"
            + (f" ({cert.failed_bullet})" if cert.failed_bullet else ""),
        )
    cert = validate.compatibility_certificate(LevyTriplet.sas(0.5), frac(0.6), d=2)
    s.check(
        "certificate-pmin-below-one",
        cert.accepted and cert.p_min < 1.0,
        f"p_min {cert.p_min:g}",
    )


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {SUITES}", file=sys.stderr)
        return 2
    s = _Suite()
    table = {
        "bounds": _suite_bounds,
        "psd": _suite_psd,
        "inverses": _suite_inverses,
        "adjoints": _suite_adjoints,
        "ecf": _suite_ecf,
        "certificates": _suite_certificates,
    }
    names = list(table) if args.suite == "all" else [args.suite]
    for name in names:
        table[name](s, args.seed)
    failures = s.emit()
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="levyfield",
        description="simulate sparse-process fields and verify the model identities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="synthesize one field from a config file")
    sim.add_argument("--config", required=True, help="flat key=value config file")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    sim.add_argument("--out", default=".", help="output directory")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("--suite", required=True, help="one of " + ", ".join(SUITES))
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
