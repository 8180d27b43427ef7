"""Command line runner: ``tfpsi <suite> [options]``.

Every suite builds the configured objects, runs its checks, writes
``report.json`` plus CSV tables into ``--out`` and exits with 0 (all checks
pass), 2 (a numerical check failed) or 1 (bad configuration or another
structural error).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import aldiag, cdmat, molecules, phase, presets, seqalg, symclass, weyl
from ._rng import complex_normal, make_rng
from .serialize import load, save, write_json, write_table

SUITES = ("frame", "covariance", "aldiag", "algebra", "invert", "hormander", "molecules",
          "sinebasis", "appendix")

# default tolerance per metric; a check passes when metric <= tolerance
DEFAULT_TOLERANCES = {
    "parsevalResidual": 1e-10,
    "frameOperatorResidual": 1e-10,
    "eq4aMaxRelErr": 1e-9,
    "readbackMaxRelErr": 1e-9,
    "magicMaxRelErr": 1e-10,
    "grandSymbolExcess": 1e-11,
    "envelopeExcess": 1e-11,
    "dominatingExcess": 1e-10,
    "dominatingNormExcess": 1e-10,
    "normUpperExcess": 1e-10,
    "kernelErr": 1e-9,
    "rangeErr": 1e-9,
    "diagramResidual": 1e-10,
    "algebraIdentityErr": 1e-8,
    "complementErr": 1e-9,
    "normChainExcess": 1e-10,
    "productBoundViolation": 1e-12,
    "boundednessExcess": 1e-10,
    "pinvMatchFrob": 1e-8,
    "spectralResidualP2": 1e-9,
    "spectralResidualPinf": 1e-8,
    "inverseDecayMargin": 0.5,
    "envelopeBeyondCutoff": 1e-10,
    "moleculeBoundExcess": 1e-10,
    "moleculeDiagExcess": 1e-10,
    "frameDiagExcess": 1e-10,
    "windowDecaySpread": 0.2,
    "gramDeviation": 1e-5,
    "kompostMaxErr": 1e-12,
    "bellPartitionErr": 1e-10,
    "l1MaxRelErr": 1e-3,
    "diagonalFourierErr": 1e-10,
    "grsLast": 1.3,
}


class UsageError(Exception):
    """Invalid configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    n: int = 33
    alpha: int = 3
    beta: int = 3
    seed: int = 7
    windowKind: str = "periodizedGaussian"
    windowFile: str | None = None
    symbol: str | None = None  # None: the suite's own default preset
    amplitude: float = 0.3
    degree: int = 2
    bandwidth: float = 3.0
    symbolFile: str | None = None
    weightKind: str = "flat"
    s: float = 0.0
    delta: float = 0.2
    b: float = 0.5
    q: str = "1"
    count: int = 10
    symbolCount: int = 5
    hormanderS: list = field(default_factory=lambda: [0, 2, 4, 6, 8])
    hormanderCutoff: float = 6.0
    moleculeS: float = 4.0
    jitterBound: float = 1.5
    bellAlpha: float = 1.0
    bellEpsilon: float = 0.25
    smoothness: int = 3
    bells: int = 4
    lMax: int = 15
    gridPoints: int = 2048
    sineS: list = field(default_factory=lambda: [2, 3, 4])
    tSamples: int = 11
    grsNMax: int = 50
    l1GridM: int = 4096
    tolerances: dict = field(default_factory=dict)

    def validate(self):
        if self.n < 1 or self.n % 2 == 0:
            raise UsageError(f"n: must be an odd positive integer, got {self.n}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if v < 1 or self.n % v:
                raise UsageError(f"{name}: must be a positive divisor of n={self.n}, got {v}")
        if self.alpha * self.beta >= self.n:
            raise UsageError(f"alpha, beta: alpha*beta must be < n, got {self.alpha * self.beta}")
        if self.windowKind not in ("periodizedGaussian", "delta", "custom-file"):
            raise UsageError(f"windowKind: unknown value {self.windowKind!r}")
        if self.windowKind == "custom-file" and not self.windowFile:
            raise UsageError("windowFile: required when windowKind is custom-file")
        presets_ok = ("constant", "bump", "trigPoly", "randomBandlimited", "rough", "fromFile")
        if self.symbol is not None and self.symbol not in presets_ok:
            raise UsageError(f"symbol: unknown preset {self.symbol!r}")
        if self.symbol == "fromFile" and not self.symbolFile:
            raise UsageError("symbolFile: required for the fromFile preset")
        if self.weightKind not in ("flat", "polynomial", "subexponential"):
            raise UsageError(f"weightKind: unknown value {self.weightKind!r}")
        if str(self.q) not in ("1", "inf"):
            raise UsageError(f"q: must be 1 or inf, got {self.q!r}")
        if self.bells % 2:
            raise UsageError(f"bells: must be even, got {self.bells}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise UsageError(f"tolerances: unknown metric(s) {sorted(unknown)}")
        try:
            self.weight()
            self.algebra()
        except ValueError as exc:
            raise UsageError(f"weightKind/s/q: {exc}") from None

    def echo(self) -> dict:
        return asdict(self)

    def lattice(self) -> seqalg.PhaseLattice:
        return seqalg.PhaseLattice(self.n, self.alpha, self.beta)

    def weight(self) -> seqalg.WeightSpec:
        return seqalg.WeightSpec(self.weightKind, s=float(self.s), delta=float(self.delta),
                                 b=float(self.b))

    def algebra(self) -> seqalg.AlgebraSpec:
        q = math.inf if str(self.q) == "inf" else 1
        return seqalg.AlgebraSpec(self.weight(), q, self.lattice())

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))


class Suite:
    """Collects metrics and pass/fail checks for one report."""

    def __init__(self, name: str, cfg: ExperimentConfig, out: Path):
        self.name = name
        self.cfg = cfg
        self.out = out
        self.metrics: dict = {}
        self.notes: dict = {}
        self.failed: list[str] = []

    def note(self, key: str, value: str):
        """Non-numeric provenance (symbol ids and the like)."""
        self.notes[key] = value

    def metric(self, key: str, value):
        if isinstance(value, (bool, np.bool_)):
            value = int(bool(value))
        self.metrics[key] = value

    def le(self, key: str, value: float, tol_name: str | None = None):
        """Record ``value`` and require ``value <= tolerance``."""
        self.metric(key, float(value))
        if not float(value) <= self.cfg.tol(tol_name or key):
            self.failed.append(key)

    def ge(self, key: str, value: float, bound: float):
        self.metric(key, float(value))
        if not float(value) >= bound:
            self.failed.append(key)

    def require(self, key: str, flag: bool):
        self.metric(key, bool(flag))
        if not flag:
            self.failed.append(key)

    def table(self, name: str, columns, rows):
        write_table(self.out / f"{name}.csv", columns, rows)


def _window(cfg: ExperimentConfig) -> phase.GaborSystem:
    lat = cfg.lattice()
    if cfg.windowKind == "periodizedGaussian":
        g = phase.periodized_gaussian(cfg.n)
    elif cfg.windowKind == "delta":
        g = np.zeros(cfg.n, complex)
        g[0] = 1.0
    else:
        g = np.asarray(load(cfg.windowFile), complex)
        if g.shape != (cfg.n,):
            raise UsageError(f"windowFile: expected a signal of length {cfg.n}")
    return phase.tighten(g, lat)


def _symbol(cfg: ExperimentConfig, default: str, seed_offset: int = 0) -> tuple[np.ndarray, str]:
    preset = cfg.symbol or default
    seed = cfg.seed + seed_offset
    if preset == "fromFile":
        sigma = np.asarray(load(cfg.symbolFile), complex)
        if sigma.shape != (cfg.n, cfg.n):
            raise UsageError(f"symbolFile: expected an {cfg.n} x {cfg.n} symbol")
        return sigma, f"fromFile:{Path(cfg.symbolFile).name}"
    kw = {"seed": seed, "amplitude": cfg.amplitude, "degree": cfg.degree, "bandwidth": cfg.bandwidth}
    return presets.make_symbol(cfg.n, preset, **kw), f"{preset}:{seed}"


def _signals(cfg: ExperimentConfig, count: int, salt: int) -> np.ndarray:
    return complex_normal(make_rng(cfg.seed * 1000 + salt), (count, cfg.n))


# --- suites -------------------------------------------------------------------


def run_frame(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    st.le("frameOperatorResidual", float(np.abs(sys_.frame_op - np.eye(cfg.n)).max()))
    worst = 0.0
    rows = []
    for i, f in enumerate(_signals(cfg, 20, 1)):
        c = phase.analysis(sys_, f)
        energy = float(np.sum(np.abs(c.flat) ** 2))
        norm2 = float(np.vdot(f, f).real)
        rel = abs(energy - norm2) / norm2
        worst = max(worst, rel)
        recon = float(np.linalg.norm(phase.synthesis(sys_, c) - f) / math.sqrt(norm2))
        rows.append([i, energy, norm2, rel, recon])
    st.le("parsevalResidual", worst)
    st.metric("reconstructionErr", max(r[4] for r in rows))
    st.table("parseval", ["signal", "coefficientEnergy", "signalEnergy", "relErr", "reconstructionErr"], rows)
    save(sys_.window, st.out / "window.csv")


def run_covariance(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    sigma, sid = _symbol(cfg, "randomBandlimited")
    st.note("symbolId", sid)
    rep = weyl.covariance_check(sigma, sys_.window)
    st.le("eq4aMaxRelErr", rep.max_rel_err)
    st.metric("covarianceConstant", rep.constant)
    st.metric("pairs", rep.pairs)
    st.le("readbackMaxRelErr", weyl.readback_check(sigma, sys_.window))
    mag = phase.magic_formula_check(sys_.window)
    st.le("magicMaxRelErr", mag.max_rel_err)
    st.metric("magicConstant", mag.constant)


def _spec_pair(cfg):
    lat = cfg.lattice()
    return [("l1flat", seqalg.AlgebraSpec(seqalg.WeightSpec.flat(), 1, lat)),
            ("linfPoly3", seqalg.AlgebraSpec(seqalg.WeightSpec.polynomial(3), math.inf, lat)),
            ("config", cfg.algebra())]


def run_aldiag(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    rows, chain_rows = [], []
    worst = {k: -math.inf for k in ("grandSymbolExcess", "envelopeExcess", "dominatingExcess",
                                    "dominatingNormExcess", "normUpperExcess", "kernelErr",
                                    "rangeErr", "diagramResidual")}
    lower_ok = True
    for i in range(cfg.symbolCount):
        sigma, sid = _symbol(cfg, "randomBandlimited", i)
        m = aldiag.gabor_matrix(sigma, sys_, sid, seed=cfg.seed)
        kr = aldiag.kernel_range_check(m)
        worst["kernelErr"] = max(worst["kernelErr"], kr.kernel_err)
        worst["rangeErr"] = max(worst["rangeErr"], kr.range_err)
        worst["diagramResidual"] = max(worst["diagramResidual"], m.diagram_residual)
        for name, spec in _spec_pair(cfg):
            ch = aldiag.aldia_chain_check(sigma, sys_, spec)
            worst["grandSymbolExcess"] = max(worst["grandSymbolExcess"], ch.grand_symbol_excess)
            worst["envelopeExcess"] = max(worst["envelopeExcess"], ch.envelope_excess)
            worst["dominatingExcess"] = max(worst["dominatingExcess"], ch.dominating_excess)
            worst["dominatingNormExcess"] = max(worst["dominatingNormExcess"],
                                                ch.amalgam_norm_H / ch.norm_bound - 1)
            ne = aldiag.norm_equivalence_check(sigma, sys_, spec)
            worst["normUpperExcess"] = max(worst["normUpperExcess"],
                                           ne.matrix_norm / ne.symbol_norm - 1 if ne.symbol_norm else 0.0)
            lower_ok = lower_ok and ne.lower_ok
            rows.append([sid, name, ne.matrix_norm, ne.symbol_norm, ne.c_lower, ne.constructive_c])
            chain_rows.append([sid, name, ch.grand_symbol_excess, ch.envelope_excess,
                               ch.dominating_excess, ch.amalgam_norm_H, ch.norm_bound, ch.constant])
    for k, v in worst.items():
        st.le(k, v)
    st.require("constructiveLowerOk", lower_ok)
    st.table("norm_equivalence", ["symbol", "spec", "matrixNorm", "symbolNorm", "cLower", "constructiveC"], rows)
    st.table("aldia_chain", ["symbol", "spec", "grandSymbolExcess", "envelopeExcess", "dominatingExcess",
                             "normH", "normBound", "C"], chain_rows)


def run_algebra(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    lat = sys_.lattice
    sigma, sid = _symbol(cfg, "randomBandlimited")
    tau, tid = presets.trig_poly(cfg.n, cfg.degree, cfg.seed + 101), f"trigPoly:{cfg.seed + 101}"
    st.note("symbolId", sid)
    st.note("tauId", tid)
    ai = aldiag.algebra_identity_check(sigma, tau, sys_, cfg.count, cfg.seed)
    st.le("algebraIdentityErr", ai.max_err_on_range)
    st.le("complementErr", ai.max_err_complement)
    chain = aldiag.algebra_norm_chain(sigma, tau, sys_, cfg.algebra())
    st.le("normChainExcess", chain.product_norm / chain.bound - 1)
    st.metric("normChainConstant", chain.constant)

    rng = make_rng(cfg.seed)
    worst = -math.inf
    for _ in range(20):
        a = cdmat.CDMatrix(complex_normal(rng, (lat.size, lat.size)), lat)
        b = cdmat.CDMatrix(complex_normal(rng, (lat.size, lat.size)), lat)
        rep = cdmat.envelope_product_bound(a, b)
        worst = max(worst, rep.max_violation / rep.scale)
    st.le("productBoundViolation", worst)

    rows = []
    excess = -math.inf
    spec = cfg.algebra()
    for p in (1, 2, math.inf):
        br = aldiag.boundedness_check(sigma, sys_, spec, cfg.weight(), p, cfg.count, cfg.seed)
        excess = max(excess, br.worst_ratio - 1)
        rows.append([_pname(p), br.worst_ratio, br.constant, br.matrix_norm, br.ok])
    st.le("boundednessExcess", excess)
    st.table("boundedness", ["p", "worstRatio", "actionConstant", "matrixNorm", "ok"], rows)


def _pname(p):
    return "inf" if math.isinf(p) else str(int(p))


def _fit_row(fit):
    return [math.nan, math.nan] if fit is None else [fit.s_hat, fit.c_hat]


def run_invert(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    sigma, sid = _symbol(cfg, "bump")
    st.note("symbolId", sid)
    tau, rep = aldiag.invert_symbol(sigma, sys_)
    st.le("pinvMatchFrob", rep.pinv_match_frob)
    st.metric("smallestSingularRatio", rep.smallest_singular_ratio)
    lat = sys_.lattice
    sp2 = aldiag.spectral_invariance_experiment(sigma, sys_, cfg.algebra(), 2, seqalg.WeightSpec.flat(),
                                                cfg.count, cfg.seed)
    spi = aldiag.spectral_invariance_experiment(sigma, sys_, cfg.algebra(), math.inf,
                                                seqalg.WeightSpec.polynomial(2), cfg.count, cfg.seed)
    st.le("spectralResidualP2", sp2.residual)
    st.le("spectralResidualPinf", spi.residual)
    st.metric("inverseMatrixNorm", sp2.inverse_matrix_norm)
    rows = [["sigma", *_fit_row(rep.decay_sigma)], ["tau", *_fit_row(rep.decay_tau)]]

    a = cdmat.perturbed_identity(lat, 0.1, 4.0, cfg.seed)
    ai = cdmat.pinv(a)
    fa, fi = cdmat.decay_fit(a.envelope), cdmat.decay_fit(ai.envelope)
    rows += [["syntheticA", fa.s_hat, fa.c_hat], ["syntheticInverse", fi.s_hat, fi.c_hat]]
    st.ge("syntheticInverseDecay", fi.s_hat, 4.0 - cfg.tol("inverseDecayMargin"))
    st.table("decay_fits", ["matrix", "sHat", "cHat"], rows)
    save(tau, st.out / "tau.csv")


def run_hormander(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    sigma, sid = _symbol(cfg, "trigPoly")
    st.note("symbolId", sid)
    prof = symclass.hormander_profile(sigma, sys_.window, cfg.hormanderS)
    rows = []
    finite = True
    for r in prof.rows:
        rows.append([r.s, r.fit.s_hat, r.constant])
        finite = finite and math.isfinite(r.constant)
    st.require("constantsFinite", finite)
    st.metric("fittedDecay", prof.rows[0].fit.s_hat)
    peak = float(np.abs(prof.envelope.values).max())
    st.le("envelopeBeyondCutoff", prof.max_beyond(cfg.hormanderCutoff))
    st.metric("envelopeBeyondCutoffRel", prof.max_beyond(cfg.hormanderCutoff) / peak)
    st.table("hormander", ["s", "fittedDecay", "C_s"], rows)


def run_molecules(st: Suite):
    cfg = st.cfg
    sys_ = _window(cfg)
    sigma, sid = _symbol(cfg, "bump")
    st.note("symbolId", sid)
    fam_e = molecules.make_molecules(sys_, cfg.jitterBound, cfg.moleculeS, cfg.seed)
    fam_f = molecules.make_molecules(sys_, cfg.jitterBound, cfg.moleculeS, cfg.seed + 1)
    st.le("moleculeBoundExcess", max(fam_e.bound_excess(), fam_f.bound_excess()))
    st.metric("centredConstant", max(fam_e.centred_constant(cfg.moleculeS),
                                     fam_f.centred_constant(cfg.moleculeS)))
    rep = molecules.molecule_almost_diag(sigma, fam_e, fam_f, cfg.algebra())
    st.le("moleculeDiagExcess", rep.max_excess)
    frame = molecules.frame_molecules(sys_)
    st.le("frameDiagExcess", molecules.molecule_almost_diag(sigma, frame, frame).max_excess)
    # second window: Gaussian 25% wider, tightened on the same lattice
    d = seqalg.periodic_abs(np.arange(cfg.n), cfg.n)
    g2 = np.exp(-np.pi * (d / (1.25 * math.sqrt(cfg.n))) ** 2)
    sys2 = phase.tighten(g2, sys_.lattice)
    s1 = molecules.envelope_decay(fam_e).s_hat
    s2 = molecules.envelope_decay(fam_e, sys2).s_hat
    st.le("windowDecaySpread", abs(s2 / s1 - 1))
    lat = sys_.lattice
    st.table("molecule_envelope", ["k", "l", "bound", "hTilde"],
             [[int(k), int(l), float(a), float(h)] for (k, l), a, h in
              zip(lat.indices, fam_e.envelope_bound.real.ravel(), rep.h_tilde.real.ravel())])
    st.table("molecules", ["index", "gridpoint", "re", "im"],
             [[int(i), int(t), float(v.real), float(v.imag)]
              for i in range(fam_e.members.shape[1]) for t, v in enumerate(fam_e.members[:, i])])


def run_sinebasis(st: Suite):
    cfg = st.cfg
    spec = molecules.BellSpec.on_circle(cfg.bellAlpha, cfg.bellEpsilon, cfg.smoothness, cfg.bells,
                                        cfg.gridPoints)
    basis = molecules.local_sine_basis(spec, cfg.bells, cfg.lMax)
    gram = basis.gram()
    st.le("gramDeviation", float(np.abs(gram - np.eye(len(gram))).max()))
    st.le("bellPartitionErr", molecules.bell_partition_error(spec, cfg.bells))
    st.le("kompostMaxErr", max(molecules.kompost_decompose(spec, k, l, cfg.bells).max_point_err
                               for k in range(cfg.bells) for l in range(cfg.lMax + 1)))
    period = cfg.bellAlpha * cfg.bells

    def sigma(t, w):
        return np.cos(2 * np.pi * t / period) + 0 * w

    tab = molecules.sine_basis_almost_diag(sigma, spec, cfg.bells, cfg.lMax, cfg.sineS)
    finite = all(math.isfinite(c) for c in tab.constants.values())
    st.require("constantsFinite", finite)
    for s, c in tab.rows():
        st.metric(f"C_s{s:g}", c)
    st.table("sine_cs", ["s", "C_s"], tab.rows())


def run_appendix(st: Suite):
    cfg = st.cfg
    rng = make_rng(cfg.seed)
    seq = complex_normal(rng, 16)
    rep = seqalg.l1_maximality_check(seq, cfg.l1GridM, offset=-8)
    st.le("l1MaxRelErr", rep.rel_err)
    lat = cfg.lattice()
    a = cdmat.CDMatrix(complex_normal(rng, (lat.size, lat.size)), lat)
    fr = cdmat.diagonal_fourier_check(a, _common_period(lat, cfg.tSamples))
    st.le("diagonalFourierErr", fr.max_err)
    prof = seqalg.grs_profile(seqalg.WeightSpec.polynomial(3), (1, 0), cfg.grsNMax)
    st.le("grsLast", float(prof[-1]))
    st.require("grsTailDecreasing", bool(np.all(np.diff(prof[-10:]) < 0)))
    st.table("grs_profile", ["n", "value"], [[i + 1, float(v)] for i, v in enumerate(prof)])


def _common_period(lat, requested):
    ka, kb = lat.shape
    lcm = ka * kb // math.gcd(ka, kb)
    return requested if requested % lcm == 0 else lcm


RUNNERS = {name: globals()[f"run_{name}"] for name in SUITES}


# --- entry point --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tfpsi", description=__doc__.splitlines()[0])
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--out", default="tfpsi-out", help="output directory (default: tfpsi-out)")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--beta", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", dest="windowKind", choices=("periodizedGaussian", "delta", "custom-file"))
    p.add_argument("--window-file", dest="windowFile")
    p.add_argument("--symbol", choices=("constant", "bump", "trigPoly", "randomBandlimited", "rough",
                                        "fromFile"))
    p.add_argument("--symbol-file", dest="symbolFile")
    p.add_argument("--amplitude", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--weight", dest="weightKind", choices=("flat", "polynomial", "subexponential"))
    p.add_argument("--s", type=float)
    p.add_argument("--q", choices=("1", "inf"))
    p.add_argument("--count", type=int)
    return p


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"config: cannot read {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config: top level must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    bad = set(data) - known
    if bad:
        raise UsageError(f"{sorted(bad)[0]}: unknown config field")
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            data[name] = v
    if "q" in data:
        data["q"] = "inf" if str(data["q"]).lower() in ("inf", "infinity") else str(data["q"]).split(".")[0]
    cfg = ExperimentConfig(**data)
    cfg.validate()
    return cfg


def run(suite: str, cfg: ExperimentConfig, out) -> dict:
    """Run one suite and write its artifacts; returns the report dict."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    st = Suite(suite, cfg, out)
    t0 = time.perf_counter()
    RUNNERS[suite](st)
    report = {
        "suiteName": suite,
        "configEcho": cfg.echo(),
        "metrics": st.metrics,
        "provenance": st.notes,
        "failedChecks": st.failed,
        "pass": not st.failed,
        "wallTimeMs": round((time.perf_counter() - t0) * 1000.0, 3),
    }
    write_json(out / "report.json", report)
    return report


def _thread_limit():
    raw = os.environ.get("TFPSI_THREADS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"TFPSI_THREADS: expected an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("TFPSI_THREADS: must be >= 1")
    return value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        limit = _thread_limit()
        if limit is None:
            report = run(args.suite, cfg, args.out)
        else:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=limit):
                report = run(args.suite, cfg, args.out)
    except UsageError as exc:
        print(f"tfpsi: usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"tfpsi: error: {exc}", file=sys.stderr)
        return 1
    status = "pass" if report["pass"] else "FAIL " + ", ".join(report["failedChecks"])
    print(f"{args.suite}: {status} ({report['wallTimeMs']:.0f} ms) -> {Path(args.out) / 'report.json'}")
    return 0 if report["pass"] else 2


if __name__ == "__main__":
    sys.exit(main())
