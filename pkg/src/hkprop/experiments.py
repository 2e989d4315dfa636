"""Reproducible experiment drivers shared by the command line and the tests.

Every experiment is a pure function of a validated ExperimentConfig (plus a
few operation-level arguments such as ladders and checkpoints), emitting
tabular rows with stable column names.  All randomness is derived from the
configured seed; repeated runs are byte-identical.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import (coherent_initial_error, empirical_rmse, fit_power_law,
                       gram_initial_error, l2_error, spectrum,
                       variance_harmonic_sqrt_husimi,
                       variance_initial_sqrt_husimi)
from .ensemble import HKEnsemble, synthesize_on_grid
from .grids import GridWavefunction, SpatialGrid
from .potentials import HarmonicPotential, MorseSpec
from .reference import (harmonic_action, harmonic_classical, harmonic_exact,
                        harmonic_prefactor, split_operator_propagate)
from .sampling import HUSIMI, SQRT_HUSIMI, SamplingScheme
from .wavepacket import GaussianWavepacket, evaluate_gaussian


class ConfigError(ValueError):
    """Raised on any malformed or out-of-range configuration input."""


class NumericalFailure(RuntimeError):
    """Raised when too many trajectories go invalid (caustics, overflows)."""


INVALID_FRACTION_LIMIT = 0.01


# --------------------------------------------------------------- validation

def _require_keys(d, path, required, optional=()):
    if not isinstance(d, dict):
        raise ConfigError("%s: expected an object, got %r" % (path, type(d).__name__))
    unknown = set(d) - set(required) - set(optional)
    if unknown:
        raise ConfigError("%s: unknown keys %s" % (path, sorted(unknown)))
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError("%s: missing required keys %s" % (path, missing))


def _number(d, path, key, positive=False, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ConfigError("%s.%s: missing" % (path, key))
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("%s.%s: expected a number, got %r" % (path, key, v))
    if positive and v <= 0:
        raise ConfigError("%s.%s: must be positive, got %r" % (path, key, v))
    return float(v)


@dataclass
class SystemConfig:
    kind: str
    m: float = 1.0
    omega: float = 1.0
    chi: float = 0.0
    omega_eq: float = 0.0
    v_eq: float = 0.0
    q_eq: float = 0.0

    @classmethod
    def from_dict(cls, d, path="system"):
        _require_keys(d, path, ["kind"], ["m", "omega", "chi", "omega_eq", "v_eq", "q_eq"])
        kind = d.get("kind")
        if kind == "harmonic":
            _require_keys(d, path, ["kind"], ["m", "omega"])
            return cls(kind="harmonic",
                       m=_number(d, path, "m", positive=True, default=1.0),
                       omega=_number(d, path, "omega", positive=True, default=1.0))
        if kind == "morse":
            _require_keys(d, path, ["kind", "chi", "omega_eq"], ["m", "v_eq", "q_eq"])
            return cls(kind="morse",
                       m=_number(d, path, "m", positive=True, default=1.0),
                       chi=_number(d, path, "chi", positive=True),
                       omega_eq=_number(d, path, "omega_eq", positive=True),
                       v_eq=_number(d, path, "v_eq", default=0.0),
                       q_eq=_number(d, path, "q_eq", default=0.0))
        raise ConfigError("%s.kind: expected 'harmonic' or 'morse', got %r" % (path, kind))

    def morse_spec(self, hbar):
        if self.kind != "morse":
            raise ConfigError("system.kind: morse system required for this experiment")
        return MorseSpec(self.chi, self.omega_eq, v_eq=self.v_eq,
                         q_eq=self.q_eq, m=self.m, hbar=hbar)

    def potential(self, hbar):
        if self.kind == "harmonic":
            return HarmonicPotential(self.m, self.omega)
        return self.morse_spec(hbar).potential()


@dataclass
class InitialStateConfig:
    q0: list
    p0: list
    gamma: float
    hbar: float = 1.0

    @classmethod
    def from_dict(cls, d, path="initial_state"):
        _require_keys(d, path, ["q0", "p0", "gamma"], ["hbar"])
        def vec(key):
            v = d[key]
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                return [float(v)]
            if isinstance(v, list) and v and all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
                return [float(x) for x in v]
            raise ConfigError("%s.%s: expected a number or list of numbers" % (path, key))
        q0, p0 = vec("q0"), vec("p0")
        if len(q0) != len(p0):
            raise ConfigError("%s: q0 and p0 must have equal length" % path)
        return cls(q0=q0, p0=p0,
                   gamma=_number(d, path, "gamma", positive=True),
                   hbar=_number(d, path, "hbar", positive=True, default=1.0))

    def wavepacket(self, dim=None):
        q0, p0 = self.q0, self.p0
        if dim is not None and dim != len(q0):
            if len(q0) != 1:
                raise ConfigError("initial_state: cannot broadcast %d-dim centre to D=%d"
                                  % (len(q0), dim))
            q0 = q0 * dim
            p0 = p0 * dim
        return GaussianWavepacket(q0, p0, self.gamma, hbar=self.hbar)


@dataclass
class SamplingConfig:
    scheme: str
    a: float = None

    @classmethod
    def from_dict(cls, d, path="sampling"):
        _require_keys(d, path, ["scheme"], ["a"])
        scheme = d.get("scheme")
        if scheme not in (HUSIMI, SQRT_HUSIMI, "general-a"):
            raise ConfigError("%s.scheme: expected 'husimi', 'sqrt-husimi' or "
                              "'general-a', got %r" % (path, scheme))
        a = None
        if scheme == "general-a":
            a = _number(d, path, "a", positive=True)
            if a < 2.0:
                raise ConfigError("%s.a: must be >= 2" % path)
        elif "a" in d:
            raise ConfigError("%s.a: only valid for scheme 'general-a'" % path)
        return cls(scheme=scheme, a=a)

    def scheme_for(self, psi0):
        return SamplingScheme(self.scheme, psi0, a=self.a)


@dataclass
class RunConfig:
    dt: float
    n_steps: int
    n_trajectories: int
    seed: int
    k_runs: int = 1
    exact_classical: bool = False

    @classmethod
    def from_dict(cls, d, path="run"):
        _require_keys(d, path, ["dt", "n_steps", "n_trajectories", "seed"],
                      ["k_runs", "exact_classical"])
        if not isinstance(d["seed"], int) or isinstance(d["seed"], bool):
            raise ConfigError("%s.seed: a mandatory integer (no wall-clock default)" % path)
        n_steps = d["n_steps"]
        if not isinstance(n_steps, int) or n_steps < 0:
            raise ConfigError("%s.n_steps: expected a nonnegative integer" % path)
        n_traj = d["n_trajectories"]
        if not isinstance(n_traj, int) or n_traj < 1:
            raise ConfigError("%s.n_trajectories: expected a positive integer" % path)
        k_runs = d.get("k_runs", 1)
        if not isinstance(k_runs, int) or k_runs < 1:
            raise ConfigError("%s.k_runs: expected a positive integer" % path)
        exact = d.get("exact_classical", False)
        if not isinstance(exact, bool):
            raise ConfigError("%s.exact_classical: expected a boolean" % path)
        return cls(dt=_number(d, path, "dt", positive=True),
                   n_steps=n_steps, n_trajectories=n_traj, seed=d["seed"],
                   k_runs=k_runs, exact_classical=exact)


@dataclass
class GridConfig:
    x_min: float
    x_max: float
    n_points: int

    @classmethod
    def from_dict(cls, d, path="grid"):
        _require_keys(d, path, ["x_min", "x_max", "n_points"])
        n = d["n_points"]
        if not isinstance(n, int) or n < 2 or (n & (n - 1)):
            raise ConfigError("%s.n_points: expected a power-of-two integer" % path)
        x_min = _number(d, path, "x_min")
        x_max = _number(d, path, "x_max")
        if x_max <= x_min:
            raise ConfigError("%s: x_max must exceed x_min" % path)
        return cls(x_min=x_min, x_max=x_max, n_points=n)

    def grid(self):
        return SpatialGrid(self.x_min, self.x_max, self.n_points)


@dataclass
class OutputConfig:
    directory: str = "."
    formats: list = field(default_factory=lambda: ["csv"])

    @classmethod
    def from_dict(cls, d, path="output"):
        _require_keys(d, path, [], ["directory", "formats"])
        directory = d.get("directory", ".")
        if not isinstance(directory, str):
            raise ConfigError("%s.directory: expected a string" % path)
        formats = d.get("formats", ["csv"])
        if not isinstance(formats, list) or not all(f in ("csv", "json") for f in formats):
            raise ConfigError("%s.formats: expected a list drawn from ['csv', 'json']" % path)
        return cls(directory=directory, formats=formats)


@dataclass
class ExperimentConfig:
    system: SystemConfig
    initial_state: InitialStateConfig
    sampling: SamplingConfig
    run: RunConfig
    grid: GridConfig
    output: OutputConfig
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d):
        _require_keys(d, "config", ["system", "initial_state", "sampling", "run", "grid"],
                      ["output"])
        return cls(system=SystemConfig.from_dict(d["system"]),
                   initial_state=InitialStateConfig.from_dict(d["initial_state"]),
                   sampling=SamplingConfig.from_dict(d["sampling"]),
                   run=RunConfig.from_dict(d["run"]),
                   grid=GridConfig.from_dict(d["grid"]),
                   output=OutputConfig.from_dict(d.get("output", {})),
                   raw=d)

    def config_hash(self):
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


@dataclass
class ExperimentResult:
    name: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


# ------------------------------------------------------------ shared pieces

def default_ladder(n_top):
    """The N-doubling ladder 100 * 2^k capped by the configured top count."""
    rungs = []
    n = 100
    while n <= n_top:
        rungs.append(n)
        n *= 2
    if not rungs:
        raise ConfigError("run.n_trajectories: ladder needs at least 100 trajectories")
    return rungs


def _initial_errors(psi0, scheme, rungs, seed, k_runs=1, tail_tol=1e-6):
    """Mean initial-time L2 error per rung, averaged over k_runs seeds.

    Uses the exact coherent-basis metric for D <= 4 and the pairwise Gram
    metric otherwise (the latter is O(N^2) and meant for desk-scale N).
    """
    n_top = rungs[-1]
    out = np.zeros(len(rungs))
    for j in range(k_runs):
        z = scheme.sample(n_top, seed + j)
        w = scheme.prefactor(z)
        if psi0.dim <= 4:
            errs = coherent_initial_error(psi0, z, w, prefix_counts=rungs,
                                          tail_tol=tail_tol)
        else:
            if n_top > 32768:
                raise ConfigError("run.n_trajectories: the D>=5 initial-error metric "
                                  "is O(N^2); use N <= 32768")
            errs = np.array([gram_initial_error(psi0, z[:k], w[:k]) for k in rungs])
        out += np.asarray(errs)
    return out / k_runs


def _check_invalid(ens):
    frac = ens.n_invalid / ens.n
    if frac > INVALID_FRACTION_LIMIT:
        raise NumericalFailure("%.1f%% of trajectories were flagged invalid"
                               % (100 * frac))


# -------------------------------------------------------------- experiments

def run_initial_error(cfg, ladder=None):
    """Initial sampling error of both schemes over an N-doubling ladder."""
    psi0 = cfg.initial_state.wavepacket()
    rungs = ladder or default_ladder(cfg.run.n_trajectories)
    d = psi0.dim
    rows = []
    extras = {"rungs": rungs, "fits": {}, "errors": {}}
    for kind in (HUSIMI, SQRT_HUSIMI):
        scheme = SamplingScheme(kind, psi0)
        errs = _initial_errors(psi0, scheme, rungs, cfg.run.seed, cfg.run.k_runs)
        extras["errors"][kind] = errs
        if len(rungs) >= 3:
            extras["fits"][kind] = fit_power_law(rungs, errs)
        for n, e in zip(rungs, errs):
            analytic = math.sqrt(variance_initial_sqrt_husimi(d) / n) \
                if kind == SQRT_HUSIMI else None
            rows.append((kind, n, float(e), analytic))
    return ExperimentResult(
        name="initial-error",
        columns=["scheme", "N", "l2_error", "analytic_prediction"],
        rows=rows,
        meta={"dimension": d, "k_runs": cfg.run.k_runs},
        extras=extras)


def run_dim_sweep(cfg, d_max=4):
    """Initial sampling error of both schemes as a function of dimension."""
    if d_max < 1 or d_max > 8:
        raise ConfigError("d_max: expected 1 <= d_max <= 8 (desk scale)")
    n = cfg.run.n_trajectories
    rows = []
    extras = {"errors": {}}
    for d in range(1, d_max + 1):
        psi0 = cfg.initial_state.wavepacket(dim=d)
        for kind in (HUSIMI, SQRT_HUSIMI):
            scheme = SamplingScheme(kind, psi0)
            err = float(_initial_errors(psi0, scheme, [n], cfg.run.seed,
                                        cfg.run.k_runs)[0])
            analytic = math.sqrt(variance_initial_sqrt_husimi(d) / n)
            rows.append((d, kind, err, analytic if kind == SQRT_HUSIMI else None))
            extras["errors"][(d, kind)] = err
    return ExperimentResult(
        name="dim-sweep",
        columns=["D", "scheme", "error", "analytic_prediction"],
        rows=rows,
        meta={"N": n},
        extras=extras)


def harmonic_estimator_on_grid(psi0, scheme, omega, m, t, z, weights, grid):
    """HK estimate psi_N(t) on a grid from exact harmonic classical inputs.

    Trajectory, action, stability and prefactor all come from their closed
    forms, so the only error left in the estimate is the Monte Carlo one.
    """
    gamma = float(psi0.gamma[0, 0])
    q_t, p_t = harmonic_classical(z, omega, m, t)
    s_t = harmonic_action(z, omega, m, t)
    r_t = harmonic_prefactor(gamma, omega, m, t)
    coeffs = weights * r_t * np.exp(1j * s_t / psi0.hbar) / len(weights)
    values = synthesize_on_grid(grid, q_t, p_t, coeffs, gamma, psi0.hbar)
    return GridWavefunction(grid, values)


def run_harmonic_error(cfg, n_times=None, workers=1):
    """Time-resolved sampling error in a harmonic well with exact classical
    inputs (trajectories, action, stability and prefactor in closed form)."""
    del workers  # synthesis is kernel-parallel already
    if cfg.system.kind != "harmonic":
        raise ConfigError("system.kind: harmonic system required")
    if not cfg.run.exact_classical:
        raise ConfigError("run.exact_classical: the harmonic-error experiment "
                          "uses the closed-form classical inputs; set it to true")
    psi0 = cfg.initial_state.wavepacket()
    if psi0.dim != 1:
        raise ConfigError("initial_state: harmonic-error experiment is 1D")
    omega, m = cfg.system.omega, cfg.system.m
    grid = cfg.grid.grid()
    n = cfg.run.n_trajectories
    k_runs = cfg.run.k_runs
    n_times = n_times or cfg.run.n_steps
    times = np.arange(n_times + 1) * (2.0 * np.pi / omega / n_times)
    gamma = float(psi0.gamma[0, 0])
    refs = [harmonic_exact(psi0, omega, m, t, grid) for t in times]

    rows = []
    extras = {"times": times, "s_k": {}, "analytic": {}}
    for kind in (HUSIMI, SQRT_HUSIMI):
        scheme = SamplingScheme(kind, psi0)
        errors = np.zeros((k_runs, times.size))
        for j in range(k_runs):
            z = scheme.sample(n, cfg.run.seed + j)
            w = scheme.prefactor(z)
            for i, t in enumerate(times):
                psi_n = harmonic_estimator_on_grid(psi0, scheme, omega, m, t,
                                                   z, w, grid)
                errors[j, i] = l2_error(psi_n, refs[i])
        s_k = np.mean(errors ** 2, axis=0)
        extras["s_k"][kind] = s_k
        if kind == SQRT_HUSIMI:
            v_t = variance_harmonic_sqrt_husimi(gamma, m, omega, times)
            extras["analytic"][kind] = v_t / n
        for i, t in enumerate(times):
            analytic = math.sqrt(extras["analytic"][kind][i]) \
                if kind in extras["analytic"] else None
            rows.append((float(t), kind, float(errors[0, i]), float(s_k[i]), analytic))
    return ExperimentResult(
        name="harmonic-error",
        columns=["t", "scheme", "error_single_run", "s_k", "analytic_prediction"],
        rows=rows,
        meta={"N": n, "k_runs": k_runs},
        extras=extras)


def run_morse_converge(cfg, ladder=None, checkpoints=None, repeats=1, workers=1):
    """||psi_N - psi_2N|| convergence in a Morse well at fixed checkpoints.

    The 2N ensemble extends the N ensemble (nested ladder by the
    counter-based sampler), repeats average the errors over shifted seeds,
    and a power law is fitted per (checkpoint, scheme).
    """
    spec = cfg.system.morse_spec(cfg.initial_state.hbar)
    pot = spec.potential()
    psi0 = cfg.initial_state.wavepacket()
    grid = cfg.grid.grid()
    rungs = ladder or default_ladder(cfg.run.n_trajectories)
    checkpoints = sorted(checkpoints or [cfg.run.n_steps])
    if checkpoints[-1] > cfg.run.n_steps:
        raise ConfigError("checkpoints beyond run.n_steps")
    n_top = rungs[-1]
    counts = rungs + [2 * n_top]

    errors = {(c, kind): np.zeros(len(rungs))
              for c in checkpoints for kind in (HUSIMI, SQRT_HUSIMI)}
    for kind in (HUSIMI, SQRT_HUSIMI):
        scheme = SamplingScheme(kind, psi0)
        for r in range(repeats):
            ens = HKEnsemble.build(psi0, scheme, 2 * n_top, cfg.run.seed + r,
                                   potential=pot, dt=cfg.run.dt, chunk=100)
            done = 0
            for c in checkpoints:
                ens.propagate(c - done, workers=workers)
                done = c
                _check_invalid(ens)
                coeffs = ens.coefficients()
                prefixes = synthesize_on_grid(
                    grid, ens.traj.q[:, 0], ens.traj.p[:, 0], coeffs,
                    float(psi0.gamma[0, 0]), psi0.hbar, chunk=100,
                    workers=workers, prefix_counts=counts)
                for i, n in enumerate(rungs):
                    psi_n = prefixes[i] / n
                    psi_2n = prefixes[i + 1] / (2 * n)
                    diff = float(np.sqrt(np.sum(np.abs(psi_n - psi_2n) ** 2) * grid.dx))
                    errors[(c, kind)][i] += diff
    rows = []
    extras = {"rungs": rungs, "fits": {}, "errors": {}}
    for c in checkpoints:
        for kind in (HUSIMI, SQRT_HUSIMI):
            errs = errors[(c, kind)] / repeats
            extras["errors"][(c, kind)] = errs
            fit = fit_power_law(rungs, errs) if len(rungs) >= 3 else None
            extras["fits"][(c, kind)] = fit
            for n, e in zip(rungs, errs):
                rows.append((c, kind, n, float(e),
                             fit.c if fit else None, fit.s if fit else None))
    return ExperimentResult(
        name="morse-converge",
        columns=["checkpoint_steps", "scheme", "N", "error_n_vs_2n", "fit_c", "fit_s"],
        rows=rows,
        meta={"chi": spec.chi, "repeats": repeats},
        extras=extras)


def run_position_density(cfg, workers=1):
    """Position densities of both schemes against the grid-based reference."""
    psi0 = cfg.initial_state.wavepacket()
    if psi0.dim != 1:
        raise ConfigError("initial_state: density experiment is 1D")
    pot = cfg.system.potential(cfg.initial_state.hbar)
    grid = cfg.grid.grid()
    ref = split_operator_propagate(evaluate_gaussian(psi0, grid), pot,
                                   cfg.run.dt, cfg.run.n_steps,
                                   hbar=cfg.initial_state.hbar)
    densities = {}
    for kind in (HUSIMI, SQRT_HUSIMI):
        scheme = SamplingScheme(kind, psi0)
        ens = HKEnsemble.build(psi0, scheme, cfg.run.n_trajectories, cfg.run.seed,
                               potential=pot, dt=cfg.run.dt)
        ens.propagate(cfg.run.n_steps, workers=workers)
        _check_invalid(ens)
        densities[kind] = ens.wavefunction(grid, workers=workers).density()
    ref_d = ref.density()
    rows = [(float(x), float(ref_d[i]), float(densities[HUSIMI][i]),
             float(densities[SQRT_HUSIMI][i]),
             float(abs(densities[HUSIMI][i] - ref_d[i])),
             float(abs(densities[SQRT_HUSIMI][i] - ref_d[i])))
            for i, x in enumerate(grid.x)]
    return ExperimentResult(
        name="density",
        columns=["x", "density_reference", "density_husimi", "density_sqrt_husimi",
                 "abs_err_husimi", "abs_err_sqrt_husimi"],
        rows=rows,
        meta={"N": cfg.run.n_trajectories, "t": cfg.run.dt * cfg.run.n_steps},
        extras={"reference": ref, "densities": densities, "grid": grid})


def run_spectrum(cfg, damping_hwhm=None, workers=1):
    """Energy spectra from HK and grid-reference autocorrelation functions."""
    psi0 = cfg.initial_state.wavepacket()
    if psi0.dim != 1:
        raise ConfigError("initial_state: spectrum experiment is 1D")
    pot = cfg.system.potential(cfg.initial_state.hbar)
    hbar = cfg.initial_state.hbar
    grid = cfg.grid.grid()
    n_steps = cfg.run.n_steps
    scheme = cfg.sampling.scheme_for(psi0)

    ens = HKEnsemble.build(psi0, scheme, cfg.run.n_trajectories, cfg.run.seed,
                           potential=pot, dt=cfg.run.dt)
    c_hk = np.empty(n_steps + 1, dtype=np.complex128)
    c_hk[0] = ens.autocorrelation()
    for k in range(1, n_steps + 1):
        ens.propagate(1, workers=workers)
        c_hk[k] = ens.autocorrelation()
    _check_invalid(ens)

    psi_grid0 = evaluate_gaussian(psi0, grid)
    psi_ref = psi_grid0
    c_ref = np.empty(n_steps + 1, dtype=np.complex128)
    c_ref[0] = psi_grid0.inner(psi_ref)
    for k in range(1, n_steps + 1):
        psi_ref = split_operator_propagate(psi_ref, pot, cfg.run.dt, 1,
                                           hbar=hbar, edge_monitor=False)
        c_ref[k] = psi_grid0.inner(psi_ref)

    energies, inten_hk = spectrum(c_hk, cfg.run.dt, hbar=hbar,
                                  damping_hwhm=damping_hwhm)
    _, inten_ref = spectrum(c_ref, cfg.run.dt, hbar=hbar,
                            damping_hwhm=damping_hwhm)
    rows = [(float(e), float(ih), float(ir))
            for e, ih, ir in zip(energies, inten_hk, inten_ref)]
    return ExperimentResult(
        name="spectrum",
        columns=["energy", "intensity_hk", "intensity_reference"],
        rows=rows,
        meta={"N": cfg.run.n_trajectories, "scheme": scheme.kind,
              "autocorr_t0": (float(c_hk[0].real), float(c_hk[0].imag))},
        extras={"autocorr_hk": c_hk, "autocorr_ref": c_ref,
                "energies": energies, "intensity_hk": inten_hk,
                "intensity_ref": inten_ref})
