"""Experiment orchestration: single runs, sweeps and schedule exports.

All outputs are plain CSV with ``#``-prefixed header lines echoing the
resolved configuration, plus a JSON run summary.  Nothing is random, so a
given configuration always produces byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import observables as obs
from .dynamics import (
    NORM_TOL,
    CdMode,
    HamiltonianAssembly,
    assemble_h,
    assemble_h0,
    default_steps,
    freeze_run,
    initial_state,
    propagate,
)
from .schedules import RampSpec, gamma, schedule_table
from .spectrum import ground_subspace, population_distribution
from .spin_ops import m_values

log = logging.getLogger(__name__)

POLE_SENTINEL = "pole"
OUTPUTS = ("trace", "distribution", "populations", "summary")


def fmt(x) -> str:
    if x is None:
        return POLE_SENTINEL
    if isinstance(x, str):
        return x
    return "%.17g" % x


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"{stage} failed: {type(exc).__name__}: {exc}")
        self.stage = stage


@dataclass(frozen=True)
class RunConfig:
    N: int = 100
    J: float = 1.0
    t_f: float = 1.0
    steps: int | None = None  # per ramp; None -> default_steps(t_f, J)
    cd_mode: str = "on"
    sample_count: int = 101
    horizon_factor: float = 1.0
    order: int = 4
    norm_tol: float = NORM_TOL
    outputs: tuple[str, ...] = ("trace", "distribution", "summary")

    def __post_init__(self):
        object.__setattr__(self, "cd_mode", CdMode.coerce(self.cd_mode).value)
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not self.t_f > 0:
            raise ValueError(f"t_f must be positive, got {self.t_f}")
        if self.steps is not None and self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.sample_count < 2:
            raise ValueError("sample_count must be >= 2")
        if self.horizon_factor < 1:
            raise ValueError("horizon_factor must be >= 1")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ValueError(f"unknown outputs {sorted(unknown)}; choose from {OUTPUTS}")

    @property
    def resolved_steps(self) -> int:
        return self.steps or default_steps(self.t_f, self.J)

    def resolved(self) -> dict:
        d = dataclasses.asdict(self)
        d["steps"] = self.resolved_steps
        d["outputs"] = list(self.outputs)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RunResult:
    config: RunConfig
    trace: list[obs.DiagnosticsSample]
    final: obs.DiagnosticsSample
    distribution: np.ndarray  # at t_f
    horizon_distribution: np.ndarray | None
    populations: list[tuple[float, np.ndarray]]
    norm_drift: float
    step_count: int
    ok: bool
    files: list[Path] = field(default_factory=list)

    def summary(self) -> dict:
        N = self.config.N
        return {
            "config": self.config.resolved(),
            "ok": self.ok,
            "norm_drift": self.norm_drift,
            "step_count": self.step_count,
            "final": dataclasses.asdict(self.final),
            "residual_energy": self.final.residual_energy,
            "m_inc": self.final.m_inc,
            "fidelity": self.final.fidelity,
            "qfi": self.final.qfi,
            "entangled": obs.is_entangled(self.final.qfi, N),
            "qfi_standard_quantum_limit": obs.standard_quantum_limit(N),
            "qfi_dicke_reference": obs.dicke_qfi(N),
            "qfi_heisenberg_limit": obs.heisenberg_limit(N),
        }


def _diagnose(t, psi, asm: HamiltonianAssembly, mode: CdMode, cfg: RunConfig) -> obs.DiagnosticsSample:
    s = t / cfg.t_f
    h0 = assemble_h0(t, asm)
    g = gamma(min(s, 1.0), asm.ramp)
    sub = ground_subspace(h0, g, cfg.J)
    e0 = float(np.min(sub.energies))
    order_param = obs.order_parameter(psi, cfg.N)
    return obs.DiagnosticsSample(
        t=float(t),
        s=float(s),
        fidelity=obs.fidelity_to_subspace(psi, sub),
        energy=assemble_h(t, asm, mode).expect(psi),
        residual_energy=h0.expect(psi) - e0,
        order_param=order_param,
        m_inc=1.0 - order_param,
        qfi=obs.qfi(psi),
    )


def _final_sample(t, psi, asm, mode, cfg) -> obs.DiagnosticsSample:
    # E_res and m_inc at t_f use the closed-form ground values -JN/2 and 1
    sample = _diagnose(t, psi, asm, mode, cfg)
    h_tf = assemble_h(cfg.t_f, asm, mode)
    return dataclasses.replace(
        sample,
        residual_energy=obs.residual_energy(psi, h_tf, cfg.J, cfg.N),
        m_inc=obs.incomplete_magnetization(psi, cfg.N),
    )


def simulate(cfg: RunConfig) -> RunResult:
    """Prepare, propagate, optionally freeze, and evaluate diagnostics."""
    mode = CdMode(cfg.cd_mode)
    try:
        asm = HamiltonianAssembly.lmg(cfg.N, RampSpec(J=cfg.J, t_f=cfg.t_f))
        psi0 = initial_state(asm)
    except Exception as exc:
        raise StageError("prepare", exc) from exc

    t_ramp = np.linspace(0.0, cfg.t_f, cfg.sample_count)
    try:
        ramp = propagate(psi0, asm, t_ramp, cfg.resolved_steps, mode,
                         order=cfg.order, norm_tol=cfg.norm_tol)
    except Exception as exc:
        raise StageError("propagate", exc) from exc
    times, states = list(ramp.times), list(ramp.states)
    drift, step_count = ramp.norm_drift, ramp.step_count

    horizon_distribution = None
    if cfg.horizon_factor > 1:
        extra = (cfg.horizon_factor - 1.0) * cfg.t_f
        n_extra = max(2, round((cfg.horizon_factor - 1.0) * (cfg.sample_count - 1)) + 1)
        steps_extra = math.ceil(cfg.resolved_steps * (cfg.horizon_factor - 1.0))
        try:
            frozen = freeze_run(ramp.final, asm, extra, samples=n_extra, steps=steps_extra)
        except Exception as exc:
            raise StageError("freeze", exc) from exc
        times += list(frozen.times[1:])
        states += list(frozen.states[1:])
        drift = max(drift, frozen.norm_drift)
        step_count += frozen.step_count
        horizon_distribution = population_distribution(frozen.final)

    try:
        trace = [_diagnose(t, psi, asm, mode, cfg) for t, psi in zip(times, states)]
        final = _final_sample(cfg.t_f, ramp.final, asm, mode, cfg)
    except Exception as exc:
        raise StageError("diagnostics", exc) from exc

    populations = []
    if "populations" in cfg.outputs:
        populations = [(t, population_distribution(psi)) for t, psi in zip(times, states)]
    return RunResult(
        config=cfg,
        trace=trace,
        final=final,
        distribution=population_distribution(ramp.final),
        horizon_distribution=horizon_distribution,
        populations=populations,
        norm_drift=float(drift),
        step_count=step_count,
        ok=bool(drift <= cfg.norm_tol),
    )


def config_header(config: dict) -> list[str]:
    return ["# config: " + json.dumps(config, sort_keys=True)]


def write_csv(path: Path, header_lines: Sequence[str], columns: Sequence[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    """Parse a file written by :func:`write_csv` into (columns, raw rows)."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def _dist_name(s: float) -> str:
    return "distribution_s" + ("%g" % s).replace(".", "p") + ".csv"


def write_run(result: RunResult, out_dir: Path) -> list[Path]:
    cfg = result.config
    out_dir = Path(out_dir)
    header = config_header(cfg.resolved())
    files = []
    m = m_values(cfg.N)
    if "trace" in cfg.outputs:
        files.append(write_csv(out_dir / "trace.csv", header, obs.DiagnosticsSample.COLUMNS,
                               (smp.row() for smp in result.trace)))
    if "distribution" in cfg.outputs:
        files.append(write_csv(out_dir / _dist_name(1.0), header, ("m", "p"),
                               zip(m, result.distribution)))
        if result.horizon_distribution is not None:
            files.append(write_csv(out_dir / _dist_name(cfg.horizon_factor), header, ("m", "p"),
                                   zip(m, result.horizon_distribution)))
    if "populations" in cfg.outputs:
        rows = ((t, t / cfg.t_f, mk, pk) for t, p in result.populations for mk, pk in zip(m, p))
        files.append(write_csv(out_dir / "populations.csv", header, ("t", "s", "m", "p"), rows))
    if "summary" in cfg.outputs:
        path = out_dir / "summary.json"
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n")
        files.append(path)
    result.files = files
    return files


def run_single(cfg: RunConfig, out_dir: Path | None = None) -> RunResult:
    log.info("run N=%d t_f=%g cd=%s steps=%d", cfg.N, cfg.t_f, cfg.cd_mode, cfg.resolved_steps)
    result = simulate(cfg)
    if out_dir is not None:
        try:
            write_run(result, out_dir)
        except OSError as exc:
            raise StageError("write", exc) from exc
    return result


SWEEP_COLUMNS = ("N", "t_f", "cd_mode", "residual_energy", "m_inc", "fidelity", "qfi",
                 "norm_drift", "status")


def _sweep_row(job: tuple[RunConfig, dict]) -> list:
    base, kw = job
    try:
        cfg = dataclasses.replace(base, **kw)
        res = simulate(cfg)
    except Exception as exc:
        log.warning("sweep row %s failed: %s", kw, exc)
        nan = float("nan")
        msg = " ".join(str(exc).replace(",", ";").split())
        N, t_f = kw.get("N", base.N), kw.get("t_f", base.t_f)
        return [N, t_f, kw["cd_mode"], nan, nan, nan, nan, nan, f"error: {msg}"]
    f = res.final
    status = "ok" if res.ok else "norm-drift"
    return [cfg.N, cfg.t_f, cfg.cd_mode, f.residual_energy, f.m_inc, f.fidelity, f.qfi,
            res.norm_drift, status]


def sweep_jobs(base: RunConfig, axis: str, values: Sequence, cd_modes: Sequence[str]) -> list[tuple[RunConfig, dict]]:
    """(base, overrides) per row; configs are built inside each row so bad values fail alone."""
    if axis not in ("t_f", "N"):
        raise ValueError(f"sweep axis must be 't_f' or 'N', got {axis!r}")
    if not values:
        raise ValueError("sweep axis values must be non-empty")
    if not cd_modes:
        raise ValueError("cd_modes must be non-empty")
    modes = [CdMode.coerce(c).value for c in cd_modes]
    jobs = []
    for v in values:
        for mode in modes:
            kw = {axis: v, "cd_mode": mode, "sample_count": 2, "outputs": ()}
            if axis == "t_f" and base.steps is not None:
                # keep the step size fixed across durations
                kw["steps"] = math.ceil(base.steps * v / base.t_f)
            jobs.append((base, kw))
    return jobs


def run_sweep(
    base: RunConfig,
    axis: str,
    values: Sequence,
    cd_modes: Sequence[str],
    out_path: Path | None = None,
    jobs: int = 1,
) -> list[list]:
    """One summary row per (axis value, cd_mode), ordered by axis then mode."""
    row_jobs = sweep_jobs(base, axis, values, cd_modes)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_sweep_row, row_jobs))
    else:
        rows = [_sweep_row(j) for j in row_jobs]
    if out_path is not None:
        echo = base.resolved()
        echo.update(sweep_axis=axis, sweep_values=list(values),
                    cd_modes=[CdMode.coerce(c).value for c in cd_modes])
        write_csv(Path(out_path), config_header(echo), SWEEP_COLUMNS, rows)
    return rows


def export_schedules(cfg: RunConfig, grid: int, Ns: Sequence[int] | None = None,
                     out_path: Path | None = None) -> tuple[list[str], list[list]]:
    """Tabulate Gamma, dGamma/dt, f per N, omega per N and the N -> infinity curves."""
    Ns = list(Ns) if Ns else [cfg.N]
    spec = RampSpec(J=cfg.J, t_f=cfg.t_f)
    header, rows = schedule_table(spec, Ns, grid)
    if out_path is not None:
        echo = cfg.resolved()
        echo.update(grid=grid, schedule_N=Ns)
        write_csv(Path(out_path), config_header(echo), header, rows)
    return header, rows
