"""NCR18650-style cell model scaled to a series/parallel pack.

Open-circuit voltage is affine in state of charge between the cutoff and
full-charge voltages (the three datasheet voltages are collinear, so the
affine form reproduces all of them), with a series resistance per cell.
State of charge is tracked by coulomb counting.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class CellParams:
    """Single-cell parameters; defaults are the NCR18650 datasheet values."""

    capacity_ah: float = 2.7
    v_max: float = 4.2
    v_cutoff: float = 3.0
    v_nominal: float = 3.6
    r_cell: float = 0.010  # ohms; not published for the cell, sized for a ~1 ohm pack

    def __post_init__(self):
        if not (self.v_cutoff < self.v_nominal < self.v_max):
            raise ValueError("cell voltages must satisfy v_cutoff < v_nominal < v_max")
        if self.capacity_ah <= 0:
            raise ValueError("capacity_ah must be positive")
        if self.r_cell < 0:
            raise ValueError("r_cell must be nonnegative")


@dataclass(frozen=True)
class PackConfig:
    """Series/parallel arrangement; default 96S1P (~403 V full pack)."""

    n_series: int = 96
    n_parallel: int = 1

    def __post_init__(self):
        if self.n_series < 1 or self.n_parallel < 1:
            raise ValueError("pack dimensions must be >= 1")

    def pack_resistance(self, cell: CellParams) -> float:
        """Terminal resistance of the whole pack in ohms."""
        return cell.r_cell * self.n_series / self.n_parallel


@dataclass(frozen=True)
class PackState:
    """State of charge as a fraction in [0, 1]."""

    soc: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.soc <= 1.0:
            raise ValueError(f"soc {self.soc} outside [0, 1]")


def open_circuit_voltage(soc: float, cell: CellParams) -> float:
    """Per-cell OCV, affine from (0, v_cutoff) to (1, v_max)."""
    if not 0.0 <= soc <= 1.0:
        raise ValueError(f"soc {soc} outside [0, 1]")
    return cell.v_cutoff + (cell.v_max - cell.v_cutoff) * soc


def pack_terminal_voltage(
    state: PackState,
    i_charge: float,
    cell: CellParams,
    cfg: PackConfig,
    ocv_fn=open_circuit_voltage,
) -> float:
    """Pack terminal voltage under a charging current (positive into the pack).

    ocv_fn is a hook for richer OCV curves; the default is the affine model.
    """
    per_cell = ocv_fn(state.soc, cell) + cell.r_cell * i_charge / cfg.n_parallel
    return cfg.n_series * per_cell


def coulomb_step(
    state: PackState, i_charge: float, dt: float, cell: CellParams, cfg: PackConfig
) -> PackState:
    """Advance SoC by coulomb counting over dt seconds, clamped to [0, 1]."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    soc = state.soc + i_charge * dt / (3600.0 * cell.capacity_ah * cfg.n_parallel)
    if soc < 0.0:
        soc = 0.0
    elif soc > 1.0:
        soc = 1.0
    return PackState(soc=soc)
