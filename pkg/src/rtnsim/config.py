"""JSON run configuration.

Physical quantities use unit-suffixed keys (``tau_c_ns``, ``j0_mhz``,
``j1_over_2pi_mhz``).  Unknown keys are rejected so that a misspelled
parameter never silently falls back to a default.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .montecarlo import EnsembleConfig
from .noise import InitialSignMode, RtnParams
from .protocol import DB_MODES, DEFAULT_ENTANGLE_DURATION, J1_OVER_2PI_MHZ, J2_OVER_2PI_MHZ, shulman_protocol
from .qdyn import J0_CONVENTIONS, j0_from_mhz
from .spectral import SAMPLING_MODES


@dataclass
class NoiseSection:
    tau_c_ns: float = 9.0
    j0_mhz: float = 11.6
    j0_convention: str = "angular"
    initial_sign_mode: str = "random_symmetric"

    def validate(self):
        if self.j0_convention not in J0_CONVENTIONS:
            raise ConfigError(f"noise.j0_convention must be one of {J0_CONVENTIONS}")
        try:
            InitialSignMode(self.initial_sign_mode)
        except ValueError:
            raise ConfigError("noise.initial_sign_mode must be fixed_plus or random_symmetric") from None
        self.params()

    def amplitude(self) -> float:
        return j0_from_mhz(self.j0_mhz, self.j0_convention)

    def params(self, tau_c_ns: float | None = None) -> RtnParams:
        return RtnParams(self.amplitude(), self.tau_c_ns if tau_c_ns is None else tau_c_ns,
                         InitialSignMode(self.initial_sign_mode))


@dataclass
class ProtocolSection:
    name: str = "shulman"
    tau_prep_ns: float = 25.0
    R: float = 1.0
    db_mode: str = "persistent"
    entangle_duration_ns: float = DEFAULT_ENTANGLE_DURATION
    j1_over_2pi_mhz: float = J1_OVER_2PI_MHZ
    j2_over_2pi_mhz: float = J2_OVER_2PI_MHZ

    def validate(self):
        if self.name != "shulman":
            raise ConfigError(f"protocol.name: unknown preset {self.name!r} (available: shulman)")
        if self.db_mode not in DB_MODES:
            raise ConfigError(f"protocol.db_mode must be one of {DB_MODES}")
        self.build()

    def build(self, tau_prep_ns=None, R=None, entangle_duration_ns=None):
        return shulman_protocol(
            self.tau_prep_ns if tau_prep_ns is None else tau_prep_ns,
            self.R if R is None else R,
            self.db_mode,
            self.entangle_duration_ns if entangle_duration_ns is None else entangle_duration_ns,
            self.j1_over_2pi_mhz, self.j2_over_2pi_mhz)


@dataclass
class EnsembleSection:
    n_trajectories: int = 5000
    batch_size: int = 100
    sample_step_ns: float = 1.0

    def validate(self):
        if not self.sample_step_ns > 0:
            raise ConfigError("ensemble.sample_step_ns must be > 0")


@dataclass
class NoiseTraceSection:
    duration_ns: float = 300.0
    sample_step_ns: float = 0.1

    def validate(self):
        if not self.duration_ns > 0 or not self.sample_step_ns > 0:
            raise ConfigError("noise_trace.duration_ns and sample_step_ns must be > 0")


@dataclass
class SpectrumSection:
    tau_c_ns: list | None = None
    n_realizations: int = 2000
    dt_ns: float = 0.5
    duration_ns: float = 2000.0
    sampling: str = "point"
    fit_band_per_ns: list | None = None

    def validate(self):
        if self.sampling not in SAMPLING_MODES:
            raise ConfigError(f"spectrum.sampling must be one of {SAMPLING_MODES}")
        if self.fit_band_per_ns is not None and len(self.fit_band_per_ns) != 2:
            raise ConfigError("spectrum.fit_band_per_ns must be [f_lo, f_hi]")
        if self.n_realizations < 1:
            raise ConfigError("spectrum.n_realizations must be >= 1")


@dataclass
class SweepSection:
    mode: str = "R"
    values: list = field(default_factory=lambda: [1.0])
    tau_prep_ns: float | None = None
    R: float | None = None

    def validate(self):
        if self.mode not in ("R", "prep"):
            raise ConfigError("sweep.mode must be 'R' or 'prep'")
        if not self.values:
            raise ConfigError("sweep.values must be non-empty")


_SECTIONS = {
    "noise": NoiseSection,
    "protocol": ProtocolSection,
    "ensemble": EnsembleSection,
    "noise_trace": NoiseTraceSection,
    "spectrum": SpectrumSection,
    "sweep": SweepSection,
}


@dataclass
class RunConfig:
    master_seed: int
    workers: int = 1
    output_prefix: str = "rtnsim"
    noise: NoiseSection = field(default_factory=NoiseSection)
    protocol: ProtocolSection = field(default_factory=ProtocolSection)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    noise_trace: NoiseTraceSection = field(default_factory=NoiseTraceSection)
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def validate(self):
        if isinstance(self.master_seed, bool) or not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        for name in _SECTIONS:
            getattr(self, name).validate()
        return self

    def ensemble_config(self, sample_grid=None, seed_offset: int = 0) -> EnsembleConfig:
        return EnsembleConfig(self.master_seed + seed_offset, self.ensemble.n_trajectories,
                              self.ensemble.batch_size, sample_grid, self.workers)


def _build_section(cls, data, name):
    if not isinstance(data, dict):
        raise ConfigError(f"section {name!r} must be a JSON object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {name!r}: {', '.join(unknown)}")
    return cls(**data)


def from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    if "master_seed" not in data:
        raise ConfigError("master_seed is required (no implicit entropy)")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    kwargs = dict(data)
    for name, cls in _SECTIONS.items():
        if name in kwargs:
            kwargs[name] = _build_section(cls, kwargs[name], name)
    try:
        return RunConfig(**kwargs).validate()
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return from_dict(data)
