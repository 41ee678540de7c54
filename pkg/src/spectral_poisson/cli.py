"""Batch entry point: verification suites, simulations, comparison reports.

    spectral-poisson verify jacobi compat --seed 7 --out-dir reports
    spectral-poisson verify jacobi --tamper          # negative control, exit 1
    spectral-poisson ch-simulate --T 10 --dt 1e-3 --out traj.csv
    spectral-poisson toda-verify --N 3
    spectral-poisson kdv-verify --pairs 10

Exit status: 0 all checks passed, 1 any failed, 2 configuration error.
Suites run in parallel threads; SPECTRAL_POISSON_THREADS caps the workers.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import brackets, kdv, peakon, reporting, toda, verify
from .brackets import SECOND_KIND, THIRD_KIND, TODA_RESTRICTED, BracketSpec
from .errors import ConfigError
from .ratfun import from_pole_residue

SUITE_IDS = {"jacobi": 1, "compat": 2, "ch": 3, "toda": 4, "kdv": 5}

DEFAULT_TOLERANCES = {
    "jacobi_third": 1e-6,
    "jacobi_second": 1e-6,
    "jacobi_toda": 1e-5,
    "compat": 1e-6,
    "casimir": 1e-5,
    "weights_sum": 1e-10,
    "zz_involution": 1e-7,
    "push_antisym": 1e-8,
    "ch_single_mass": 1e-12,
    "ch_const": 1e-9,
    "ch_drift": 1e-6,
    "ch_energy": 1e-8,
    "kdv_field": 1e-6,
    "kdv_commute": 1e-6,
    "kdv_identity": 1e-3,
}


@dataclass
class SuiteConfig:
    seed: int = 0
    suites: tuple = ("jacobi",)
    output_dir: str = "reports"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    tamper: bool = False
    jacobi_ns: tuple = (0, 1, 2, 3)
    jacobi_orders: tuple = (2, 3, 4)
    states: int = 10
    t_weights: int = 5
    compare_n: tuple = (0, 1, 2)
    T: float = 10.0
    dt: float = 1e-3
    samples: int = 20
    half_period: float = math.pi
    fourier: tuple = ((1, 0.15, 0.0), (-1, 0.15, 0.0))
    grid: int = 256
    pairs: int = 10
    steps: int = 2048

    def validate(self):
        unknown = [s for s in self.suites if s not in SUITE_IDS]
        if unknown:
            raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
        bad = [k for k in self.tolerances if k not in DEFAULT_TOLERANCES]
        if bad:
            raise ConfigError(f"unknown tolerance name(s): {', '.join(bad)}")
        if self.tamper and not set(self.suites) <= {"jacobi", "compat", "ch"}:
            raise ConfigError("--tamper supported for the jacobi, compat and ch suites")


def _rng(cfg: SuiteConfig, suite: str) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, SUITE_IDS[suite]])


def _suite_jacobi(cfg: SuiteConfig):
    rng = _rng(cfg, "jacobi")
    tol3 = cfg.tolerances["jacobi_third"]
    tol2 = cfg.tolerances["jacobi_second"]
    tolt = cfg.tolerances["jacobi_toda"]
    tamper = 0.1 if cfg.tamper else 0.0
    checks = []
    for n in cfg.jacobi_ns:
        for N in cfg.jacobi_orders:
            for s in range(cfg.states):
                chi = verify.random_weyl(rng, N)
                rep = verify.jacobi_defect(
                    BracketSpec(THIRD_KIND, n=n), chi, tolerance=tol3, tamper=tamper
                )
                checks.append(
                    reporting.check_row(f"jacobi/third n={n} N={N} state={s}", rep.defect, tol3)
                )
    for fkind in ("one", "z"):
        for N in (2, 3):
            chi = verify.random_weyl(rng, N)
            rep = verify.jacobi_defect(
                BracketSpec(SECOND_KIND, fkind=fkind), chi, tolerance=tol2, tamper=tamper
            )
            checks.append(
                reporting.check_row(f"jacobi/second f={fkind} N={N}", rep.defect, tol2)
            )
    for n in (1, 2):
        for c2 in (0.0, 1.0):
            chi = verify.random_weyl(rng, 2, normalized=True)
            chi = from_pole_residue(chi.poles, chi.residues * np.exp(c2))
            rep = verify.jacobi_defect(
                BracketSpec(TODA_RESTRICTED, n=n, c2=c2), chi, tolerance=tolt, tamper=tamper
            )
            checks.append(
                reporting.check_row(f"jacobi/toda n={n} c2={c2}", rep.defect, tolt)
            )
    return checks, None


def _suite_compat(cfg: SuiteConfig):
    rng = _rng(cfg, "compat")
    tol = cfg.tolerances["compat"]
    tamper = 0.1 if cfg.tamper else 0.0
    checks = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        for _ in range(cfg.t_weights):
            t = float(rng.uniform(-3.0, 3.0))
            N = int(rng.integers(2, 4))
            chi = verify.random_weyl(rng, N)
            rep = verify.compatibility_defect(
                BracketSpec(THIRD_KIND, n=a), BracketSpec(THIRD_KIND, n=b),
                t, chi, tolerance=tol, tamper=tamper,
            )
            checks.append(
                reporting.check_row(f"compat/pencil n=({a},{b}) t={t:+.3f}", rep.defect, tol)
            )
    return checks, None


def _suite_ch(cfg: SuiteConfig):
    rng = _rng(cfg, "ch")
    checks = []
    tol_sm = cfg.tolerances["ch_single_mass"]
    tol_c = cfg.tolerances["ch_const"]
    tol_dr = cfg.tolerances["ch_drift"]
    tol_en = cfg.tolerances["ch_energy"]

    # single mass g=1 at xi=0: chi(lambda) = -(1-2lam)/(4-4lam)
    polyval = np.polynomial.polynomial.polyval
    string = peakon.make_discrete_string([0.0], [1.0])
    phi, dphi, psi, dpsi = peakon.string_polynomials(string)
    worst = 0.0
    for lam in rng.uniform(-3.0, 0.8, 10):
        val = -polyval(lam, phi) / polyval(lam, psi)
        exact = -(1 - 2 * lam) / (4 - 4 * lam)
        worst = max(worst, abs(val - exact) / abs(exact))
    checks.append(reporting.check_row("ch/single_mass_weyl", worst, tol_sm))

    # z-form: const -1/4 and partial fractions reproduce -phi/psi
    worst_c = 0.0
    worst_pf = 0.0
    for _ in range(5):
        n = int(rng.integers(1, 4))
        x = np.sort(rng.uniform(-2.0, 2.0, n))
        while n > 1 and np.min(np.diff(x)) < 0.3:
            x = np.sort(rng.uniform(-2.0, 2.0, n))
        p = rng.uniform(0.5, 1.5, n)
        st = peakon.make_peakon_state(x, p)
        data = peakon.string_weyl(peakon.peakons_to_string(st))
        worst_c = max(worst_c, abs(data.weyl.const_term + 0.25))
        ph, _, ps, _ = peakon.string_polynomials(peakon.peakons_to_string(st))
        for z in rng.uniform(2.0, 8.0, 5):
            direct = -polyval(-1.0 / z, ph) / polyval(-1.0 / z, ps)
            worst_pf = max(worst_pf, abs(data.weyl.evaluate(z) - direct) / abs(direct))
    checks.append(reporting.check_row("ch/const_term", worst_c, tol_c))
    checks.append(reporting.check_row("ch/partial_fractions", worst_pf, tol_c))

    # N=2 flow conservation and isospectral drift
    st = peakon.make_peakon_state([-1.0, 1.0], [1.2, 0.8])
    tamper = 0.01 if cfg.tamper else 0.0
    traj = peakon.peakon_flow(st, cfg.T, cfg.dt, n_samples=cfg.samples, tamper=tamper)
    H0 = peakon.hamiltonian(st)
    p0 = peakon.total_momentum(st)
    dH = max(abs(peakon.hamiltonian(s) - H0) for s in traj.states)
    dp = max(abs(peakon.total_momentum(s) - p0) for s in traj.states)
    drift = peakon.isospectral_drift(traj)
    checks.append(reporting.check_row("ch/energy_drift", dH, tol_en))
    checks.append(reporting.check_row("ch/momentum_drift", dp, tol_en))
    checks.append(reporting.check_row("ch/isospectral_drift", drift, tol_dr))

    comparison = peakon.compare_bracket_families(st, ns=cfg.compare_n)
    for n, row in comparison["per_n"].items():
        checks.append(
            reporting.check_row(
                f"ch/pushforward_vs_third_n={n}", row["fitted_deviation"],
                None, info=row,
            )
        )
    return checks, {"bracket_comparison": comparison}


def _suite_toda(cfg: SuiteConfig):
    rng = _rng(cfg, "toda")
    checks = []
    tol_w = cfg.tolerances["weights_sum"]
    tol_cas = cfg.tolerances["casimir"]
    tol_zz = cfg.tolerances["zz_involution"]
    tol_as = cfg.tolerances["push_antisym"]

    worst_sum = 0.0
    positive = True
    herglotz = True
    n_states = max(cfg.states, 100)
    for _ in range(n_states):
        N = int(rng.integers(1, 5))
        st = toda.make_toda_state(rng.uniform(-1.5, 1.5, N), rng.uniform(-1.5, 1.5, N))
        data = toda.flaschka(st)
        worst_sum = max(worst_sum, abs(float(np.sum(data.weights)) - 1.0))
        positive = positive and bool(np.all(data.weights > 0))
        chi = toda.weyl_from_jacobi(data)
        lam = complex(rng.uniform(-2, 2), rng.uniform(0.2, 2.0))
        herglotz = herglotz and chi.evaluate(lam).imag > 0
    checks.append(reporting.check_row("toda/weights_sum", worst_sum, tol_w))
    checks.append(reporting.check_row(
        "toda/r_function_positivity", 0.0 if (positive and herglotz) else 1.0, 0.5))

    for n in (1, 2):
        chi = verify.random_weyl(rng, 3, normalized=True)
        rep = verify.casimir_defect(
            BracketSpec(TODA_RESTRICTED, n=n, c2=0.0), "phi1", chi,
            seed=cfg.seed, tolerance=tol_cas,
        )
        checks.append(reporting.check_row(f"toda/casimir_phi1 n={n}", rep.defect, tol_cas))
    chi = verify.random_weyl(rng, 3, normalized=True)
    rep = verify.casimir_defect(
        BracketSpec(TODA_RESTRICTED, n=1, c2=0.0), "phi2", chi,
        seed=cfg.seed, tolerance=tol_cas,
    )
    checks.append(reporting.check_row("toda/casimir_phi2", rep.defect, tol_cas))

    worst_zz = 0.0
    worst_as = 0.0
    for N in (2, 3):
        st = toda.make_toda_state(rng.uniform(-1.0, 1.0, N), rng.uniform(-1.0, 1.0, N))
        push = toda.pushforward_canonical(st)
        scale = max(1.0, float(np.max(np.abs(push))))
        worst_zz = max(worst_zz, float(np.max(np.abs(push[:N, :N]))) / scale)
        worst_as = max(worst_as, float(np.linalg.norm(push + push.T)) / scale)
    checks.append(reporting.check_row("toda/eigenvalue_involution", worst_zz, tol_zz))
    checks.append(reporting.check_row("toda/push_antisymmetry", worst_as, tol_as))

    st = toda.make_toda_state(rng.uniform(-1.0, 1.0, 3), rng.uniform(-1.0, 1.0, 3))
    comparison = toda.compare_bracket_families(st, ns=cfg.compare_n)
    for n, row in comparison["per_n"].items():
        checks.append(
            reporting.check_row(
                f"toda/pushforward_vs_restricted_n={n}", row["fitted_deviation"],
                None, info=row,
            )
        )
    return checks, {"bracket_comparison": comparison}


def _suite_kdv(cfg: SuiteConfig):
    rng = _rng(cfg, "kdv")
    tol_f = cfg.tolerances["kdv_field"]
    tol_c = cfg.tolerances["kdv_commute"]
    tol_i = cfg.tolerances["kdv_identity"]
    fourier = {int(j): complex(re, im) for j, re, im in cfg.fourier}
    u = kdv.PeriodicPotential(cfg.half_period, fourier, cfg.grid)
    checks = []

    v = u.values(u.grid())
    l = u.half_period
    d = lambda f, k=1: kdv.spectral_derivative(f, l, k)
    listed = {
        0: d(v),
        1: 1.5 * v * d(v) - 0.25 * d(v, 3),
        2: d(v, 5) / 16 - 1.25 * d(v) * d(v, 2) - 0.625 * v * d(v, 3) + 1.875 * v**2 * d(v),
    }
    for n in (0, 1, 2):
        dev = float(np.max(np.abs(kdv.kdv_vector_field(u, n) - listed[n])))
        checks.append(reporting.check_row(f"kdv/field_X{n}", dev, tol_f))

    for m in (0, 1, 2):
        for n in range(m + 1, 3):
            val = abs(kdv.hamiltonian_poisson(u, m, n))
            checks.append(reporting.check_row(f"kdv/commute_H{m}_H{n}", val, tol_c))

    pairs = kdv.random_spectral_pairs(rng, cfg.pairs)
    rows = kdv.deformed_ah_comparison(u, pairs, n_steps=cfg.steps)
    for i, row in enumerate(rows):
        checks.append(
            reporting.check_row(
                f"kdv/deformed_ah_pair_{i}", row["rel_err"], tol_i,
                info={"midpoint_rel_err": row["midpoint_rel_err"], "P": row["P"], "Q": row["Q"]},
            )
        )
    return checks, {"identity_rows": rows}


SUITE_RUNNERS = {
    "jacobi": _suite_jacobi,
    "compat": _suite_compat,
    "ch": _suite_ch,
    "toda": _suite_toda,
    "kdv": _suite_kdv,
}


def run_suite(cfg: SuiteConfig) -> int:
    """Run the configured suites, write reports, return the exit status."""
    cfg.validate()
    env = os.environ.get("SPECTRAL_POISSON_THREADS", "")
    workers = int(env) if env.isdigit() and int(env) > 0 else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(cfg.suites)))
    results = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {s: pool.submit(SUITE_RUNNERS[s], cfg) for s in cfg.suites}
        for s, fut in futures.items():
            results[s] = fut.result()
    all_pass = True
    for s in cfg.suites:
        checks, extra = results[s]
        report = reporting.assemble_report(s, cfg.seed, cfg.tolerances, checks, extra)
        json_path, _ = reporting.write_report(report, cfg.output_dir)
        gated = [c for c in checks if c["tolerance"] is not None]
        n_fail = sum(not c["pass"] for c in gated)
        status = "PASS" if report["pass"] else f"FAIL ({n_fail}/{len(gated)})"
        print(f"{s}: {status}  -> {json_path}")
        all_pass = all_pass and report["pass"]
    return 0 if all_pass else 1


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v != "")
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _parse_fourier(text: str) -> tuple:
    out = []
    try:
        for part in text.split(","):
            j, re_, im = part.split(":")
            out.append((int(j), float(re_), float(im)))
    except ValueError as exc:
        raise ConfigError(f"bad fourier spec {text!r}; want j:re:im,...") from exc
    return tuple(out)


def _parse_tols(items) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"bad tolerance override {item!r}; want name=value")
        name, val = item.split("=", 1)
        try:
            tols[name] = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {item!r}") from exc
    return tols


def _add_suite_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="reports")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE")
    p.add_argument("--n", default="0,1,2,3", help="third-kind powers for the jacobi suite")
    p.add_argument("--N", default="2,3,4", help="state orders for the jacobi suite")
    p.add_argument("--states", type=int, default=10)
    p.add_argument("--t-weights", type=int, default=5)
    p.add_argument("--tamper", action="store_true", help="negative control: tampered fields/flows")
    p.add_argument("--compare-n", default="0,1,2")
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--l", type=float, default=math.pi)
    p.add_argument("--fourier", default="1:0.15:0,-1:0.15:0")
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--steps", type=int, default=2048)


def _config_from_args(args, suites) -> SuiteConfig:
    return SuiteConfig(
        seed=args.seed,
        suites=tuple(suites),
        output_dir=args.out_dir,
        tolerances=_parse_tols(args.tol),
        tamper=args.tamper,
        jacobi_ns=_parse_int_list(args.n),
        jacobi_orders=_parse_int_list(args.N),
        states=args.states,
        t_weights=args.t_weights,
        compare_n=_parse_int_list(args.compare_n),
        T=args.T,
        dt=args.dt,
        samples=args.samples,
        half_period=args.l,
        fourier=_parse_fourier(args.fourier),
        grid=args.grid,
        pairs=args.pairs,
        steps=args.steps,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spectral-poisson", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run verification suites")
    p_verify.add_argument("suites", nargs="+", help="any of: " + ", ".join(SUITE_IDS))
    _add_suite_flags(p_verify)

    p_toda = sub.add_parser("toda-verify", help="shortcut for `verify toda`")
    _add_suite_flags(p_toda)
    p_kdv = sub.add_parser("kdv-verify", help="shortcut for `verify kdv`")
    _add_suite_flags(p_kdv)

    p_sim = sub.add_parser("ch-simulate", help="integrate a peakon flow, write CSV")
    p_sim.add_argument("--state", help="JSON file with {\"x\": [...], \"p\": [...]}")
    p_sim.add_argument("--x", help="comma list of positions")
    p_sim.add_argument("--p", help="comma list of momenta")
    p_sim.add_argument("--T", type=float, default=10.0)
    p_sim.add_argument("--dt", type=float, default=1e-3)
    p_sim.add_argument("--samples", type=int, default=100)
    p_sim.add_argument("--out", default="peakon-trajectory.csv")

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return run_suite(_config_from_args(args, args.suites))
        if args.command == "toda-verify":
            return run_suite(_config_from_args(args, ["toda"]))
        if args.command == "kdv-verify":
            return run_suite(_config_from_args(args, ["kdv"]))
        if args.command == "ch-simulate":
            if args.state:
                import json

                with open(args.state) as fh:
                    state = peakon.PeakonState.from_json_dict(json.load(fh))
            elif args.x and args.p:
                state = peakon.make_peakon_state(
                    [float(v) for v in args.x.split(",")],
                    [float(v) for v in args.p.split(",")],
                )
            else:
                raise ConfigError("ch-simulate needs --state or both --x and --p")
            traj = peakon.peakon_flow(state, args.T, args.dt, n_samples=args.samples)
            peakon.write_trajectory_csv(traj, args.out)
            print(f"wrote {args.out} ({len(traj.states)} samples)")
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
